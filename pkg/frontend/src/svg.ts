// Minimal SVG assembly: elements are plain strings, attributes are
// escaped, and scales map data ranges onto pixel ranges.

export type Attrs = Record<string, string | number>;

export function escapeXml(value: string): string {
  return value
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function el(tag: string, attrs: Attrs, children: string[] = []): string {
  const parts = Object.entries(attrs).map(([k, v]) => {
    const text = typeof v === "number" ? fmt(v) : escapeXml(v);
    return `${k}="${text}"`;
  });
  const open = parts.length > 0 ? `<${tag} ${parts.join(" ")}` : `<${tag}`;
  if (children.length === 0) {
    return `${open}/>`;
  }
  return `${open}>${children.join("")}</${tag}>`;
}

export function text(content: string, attrs: Attrs): string {
  const parts = Object.entries(attrs).map(([k, v]) => {
    const t = typeof v === "number" ? fmt(v) : escapeXml(v);
    return `${k}="${t}"`;
  });
  return `<text ${parts.join(" ")}>${escapeXml(content)}</text>`;
}

export function svgDocument(width: number, height: number, children: string[]): string {
  const body = children.join("\n  ");
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}" font-family="sans-serif">`,
    `  ${body}`,
    `</svg>`,
    ``,
  ].join("\n");
}

// fmt trims float noise so attribute values stay short and stable.
function fmt(n: number): string {
  const rounded = Math.round(n * 100) / 100;
  return Object.is(rounded, -0) ? "0" : String(rounded);
}

export type Scale = {
  (value: number): number;
  domain: [number, number];
  range: [number, number];
};

export function linearScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0;
  const scale = ((value: number) => {
    if (span === 0) {
      return (r0 + r1) / 2;
    }
    return r0 + ((value - d0) / span) * (r1 - r0);
  }) as Scale;
  scale.domain = domain;
  scale.range = range;
  return scale;
}

// ticks picks round step values covering the domain, at most `count+1` marks.
export function ticks(domain: [number, number], count: number): number[] {
  const [lo, hi] = domain;
  if (hi <= lo) {
    return [lo];
  }
  const rawStep = (hi - lo) / Math.max(1, count);
  const power = Math.pow(10, Math.floor(Math.log10(rawStep)));
  const candidates = [1, 2, 5, 10].map((m) => m * power);
  const step = candidates.find((c) => c >= rawStep) ?? candidates[3]!;
  const start = Math.ceil(lo / step) * step;
  const marks: number[] = [];
  for (let v = start; v <= hi + step * 1e-9; v += step) {
    marks.push(Math.round(v / step) * step);
  }
  return marks;
}
