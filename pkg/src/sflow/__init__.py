"""sflow: a discrete-event simulator of an event-driven serverless workflow
orchestrator, its polling comparator, and the monetary cost of running both."""

from .cloud import BaselineModel, ContentionTracker, PlatformModel, WarmPool
from .costs import (
    SCENARIOS,
    CostInputs,
    CostLedger,
    LineItem,
    MissingPrice,
    PricingTable,
    ScenarioSpec,
    estimate_baseline_cost,
    estimate_fixed_cost,
    estimate_variable_cost,
    inputs_from_trace,
    scenario_cost,
)
from .events import (
    EventKind,
    EventQueue,
    LatencySpec,
    RoutedEvent,
    ScheduleUpdater,
    UnknownDag,
    UnknownTable,
    route,
)
from .executors import (
    DEFAULT_CONTAINER_CONFIG,
    DEFAULT_FUNCTION_CONFIG,
    DurationExceedsLimit,
    ExecutorConfig,
    TaskAttempt,
)
from .experiments import (
    build_workload,
    compare_summaries,
    preset_cold_parallel,
    preset_cold_single,
    preset_container_single,
    preset_forest,
    preset_warm_chain,
    run_config,
)
from .metrics import (
    IncompleteTrace,
    RunMetrics,
    SummaryRow,
    compute_metrics,
    normalized_overhead,
    summarize,
)
from .model import (
    CdcRecord,
    CycleDetected,
    DagDefinition,
    DagRun,
    DuplicateDagId,
    DuplicateRunId,
    DuplicateTaskId,
    ExecutorKind,
    IllegalTransition,
    MetadataStore,
    RunState,
    SflowError,
    TaskInstance,
    TaskSpec,
    TaskState,
    UnknownEntity,
)
from .scheduler import (
    ActionKind,
    SchedulerAction,
    SchedulerConfig,
    handle_task_failure,
    plan_pass,
    scheduling_pass,
)
from .sim import (
    EventLoop,
    NonTermination,
    TraceLog,
    load_trace,
    run_baseline,
    run_event_driven,
)
from .workloads import (
    DagShapeStats,
    DanglingDependency,
    MalformedRow,
    analyze,
    fixture_path,
    gen_chain,
    gen_forest,
    gen_layered,
    gen_parallel,
    list_fixtures,
    load_dag_file,
    parse_trace_dag,
    parse_trace_dag_text,
    serialize_trace_dag,
)

__version__ = "0.1.0"
