"""
The metadata store's change-data-capture log
============================================

Every committed row mutation lands in a totally ordered log; the event
plane is driven from that log alone, which sidesteps the dual-write
problem.  This walks the log for one tiny run: gapless sequence numbers,
before/after images, routing, and crash replay.
"""

from sflow import (
    DagDefinition,
    EventKind,
    MetadataStore,
    RoutedEvent,
    TaskSpec,
    TaskState,
    route,
    scheduling_pass,
)

store = MetadataStore()
store.register_dag(DagDefinition("etl", 5.0, 1, (TaskSpec("t1", 3.0),)))

# One scheduler pass: the periodic trigger creates a run, schedules and
# queues its root.  Passes re-derive everything from the store, so a
# duplicate delivery of the same trigger is a no-op.
trigger = RoutedEvent(EventKind.PERIODIC_TRIGGER,
                      {"dag_id": "etl", "logical_time": 0.0}, emit_time=0.0)
actions, _ = scheduling_pass(store, [trigger], now=0.5)
print("pass 1 (trigger):   ", [a.kind.value for a in actions])
actions, _ = scheduling_pass(store, [], now=0.6)  # the CDC round trip
print("pass 2 (run created):", [a.kind.value for a in actions])
actions, _ = scheduling_pass(store, [trigger], now=0.7)
print("duplicate delivery:  ", [a.kind.value for a in actions] or "no-op")

# The executor's dual write is really one write: the success row commit
# is the event.
store.apply_transition("etl@0", TaskState.RUNNING, "t1", now=2.0,
                       stamps={"s_time": 2.0})
store.apply_transition("etl@0", TaskState.SUCCESS, "t1", now=5.0,
                       stamps={"c_time": 5.0, "warm": False})
scheduling_pass(store, [], now=5.5)  # settles the run

print("\nseq  table          op      changed fields")
for record in store.log:
    print(f"{record.commit_seq:3d}  {record.table:<14} {record.op:<7} "
          f"{sorted(record.before_image) or '(insert)'}")

# Routing is a pure function of the record: queued task rows go to an
# executor queue, terminal rows back to the scheduler.
queued = next(r for r in store.log
              if r.table == "task_instance" and r.after_image["state"] == "queued")
for queue_name, event in route(queued):
    print(f"\nroute(seq {queued.commit_seq}) -> {queue_name}: {event.kind.value}")

# Crash replay: a consumer that saw k records resumes with drain_cdc(k)
# and misses nothing.
k = 4
resumed = store.log[:k] + store.drain_cdc(after_seq=k)
print(f"\nreplay from seq {k}: {'complete' if resumed == list(store.log) else 'lost records'}")
print(f"run state: {store.get_run('etl@0').state.value}")
