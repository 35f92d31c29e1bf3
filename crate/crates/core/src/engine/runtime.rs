//! Backends that drive warps to completion: real threads with a polling
//! coordinator, or a deterministic virtual-time interleaving.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::mpsc::{channel, Receiver, RecvTimeoutError, Sender};
use std::thread::{self, Scope};
use std::time::{Duration, Instant};

use crate::aggregate::StoreProducer;
use crate::balance::{redistribute, should_rebalance, BalanceConfig, Snapshot};
use crate::error::{Error, Result};
use crate::metrics::BalanceStats;

use super::warp::{run_warp, RunShared, WarpState, WarpStatus};
use super::{Application, EngineConfig, SimConfig};

type Finished = (WarpState, Result<WarpStatus>);

/// Warp threads of one run, as seen by the coordinator.
pub struct Workers<'scope, 'env, A: ?Sized> {
    scope: &'scope Scope<'scope, 'env>,
    app: &'env A,
    shared: &'env RunShared<'env>,
    store: Option<&'env StoreProducer>,
    stop: &'env AtomicBool,
    tx: Sender<Finished>,
    rx: Receiver<Finished>,
    parked: Vec<Option<WarpState>>,
    running: usize,
    stop_timeout: Duration,
}

impl<'scope, 'env, A: Application + ?Sized> Workers<'scope, 'env, A> {
    pub fn running(&self) -> usize {
        self.running
    }

    pub fn total(&self) -> usize {
        self.parked.len()
    }

    fn launch(&mut self, mut ws: WarpState) {
        let (app, shared, store, stop) = (self.app, self.shared, self.store, self.stop);
        let tx = self.tx.clone();
        self.running += 1;
        self.scope.spawn(move || {
            let outcome = catch_unwind(AssertUnwindSafe(|| run_warp(&mut ws, app, shared, store, stop)))
                .unwrap_or_else(|_| Err(Error::Internal(format!("warp {} panicked", ws.id))));
            let _ = tx.send((ws, outcome));
        });
    }

    fn finish(&mut self, (ws, outcome): Finished) -> Result<()> {
        self.running -= 1;
        let id = ws.id;
        self.parked[id] = Some(ws);
        outcome.map(|_| ()).inspect_err(|_| self.stop.store(true, Ordering::Relaxed))
    }

    /// Blocks up to `timeout` for a warp to finish; `false` on timeout.
    fn wait(&mut self, timeout: Duration) -> Result<bool> {
        match self.rx.recv_timeout(timeout) {
            Ok(msg) => self.finish(msg).map(|_| true),
            Err(RecvTimeoutError::Timeout) => Ok(false),
            Err(RecvTimeoutError::Disconnected) => Err(Error::Internal("warp channel closed".into())),
        }
    }

    fn resume(&mut self, snapshot: Snapshot) {
        for ws in snapshot.warps {
            if ws.has_work() {
                self.launch(ws);
            } else {
                let id = ws.id;
                self.parked[id] = Some(ws);
            }
        }
    }

    fn into_warps(self) -> Vec<WarpState> {
        self.parked.into_iter().map(|w| w.expect("all warps parked")).collect()
    }
}

/// Raises the stop flag and waits until every warp has halted at a control
/// boundary, then captures all of them.
pub fn stop_consistent<A: Application + ?Sized>(workers: &mut Workers<'_, '_, A>) -> Result<Snapshot> {
    workers.stop.store(true, Ordering::Relaxed);
    let deadline = Instant::now() + workers.stop_timeout;
    while workers.running > 0 {
        let left = deadline.saturating_duration_since(Instant::now());
        if left.is_zero() || !workers.wait(left)? {
            return Err(Error::StopTimeout(workers.stop_timeout));
        }
    }
    workers.stop.store(false, Ordering::Relaxed);
    Ok(Snapshot {
        warps: workers.parked.iter_mut().map(|w| w.take().expect("stopped warp parked")).collect(),
        queue_cursor: workers.shared.queue.cursor(),
    })
}

/// Polls warp activity until every warp is done, rebalancing whenever the
/// active fraction drops below the threshold.
pub fn monitor_loop<A: Application + ?Sized>(
    workers: &mut Workers<'_, '_, A>,
    cfg: &BalanceConfig,
) -> Result<BalanceStats> {
    let mut stats = BalanceStats::default();
    let mut futile_idle = 0;
    let mut next_poll = Instant::now() + cfg.poll_interval;
    while workers.running > 0 {
        workers.wait(next_poll.saturating_duration_since(Instant::now()))?;
        let now = Instant::now();
        if now < next_poll {
            continue;
        }
        next_poll = now + cfg.poll_interval;
        let total = workers.total();
        let idle = total - workers.running;
        if should_rebalance(workers.running, total, cfg) && idle > futile_idle {
            let mut snapshot = stop_consistent(workers)?;
            let moved = redistribute(&mut snapshot, workers.shared.graph)?;
            note_rebalance(&mut stats, moved, idle, &mut futile_idle);
            workers.resume(snapshot);
        }
    }
    Ok(stats)
}

fn note_rebalance(stats: &mut BalanceStats, moved: usize, idle: usize, futile_idle: &mut usize) {
    if moved == 0 {
        stats.futile_rebalances += 1;
        *futile_idle = idle;
    } else {
        stats.rebalance_count += 1;
        stats.migrated_traversals += moved as u64;
        *futile_idle = 0;
    }
}

pub(crate) fn run_threads<A: Application + ?Sized>(
    shared: &RunShared<'_>,
    app: &A,
    warps: Vec<WarpState>,
    store: Option<&StoreProducer>,
    cfg: &EngineConfig,
) -> Result<(Vec<WarpState>, BalanceStats)> {
    let stop = AtomicBool::new(false);
    thread::scope(|scope| {
        let (tx, rx) = channel();
        let mut workers = Workers {
            scope,
            app,
            shared,
            store,
            stop: &stop,
            tx,
            rx,
            parked: (0..warps.len()).map(|_| None).collect(),
            running: 0,
            stop_timeout: cfg.stop_timeout,
        };
        for ws in warps {
            workers.launch(ws);
        }
        let stats = if cfg.balancing() {
            monitor_loop(&mut workers, &cfg.balance)?
        } else {
            while workers.running > 0 {
                workers.wait(Duration::from_secs(3600))?;
            }
            BalanceStats::default()
        };
        Ok((workers.into_warps(), stats))
    })
}

/// Discrete-event execution: the warp with the smallest virtual clock runs
/// one workflow iteration and is charged the instructions its ledger grew by.
pub(crate) fn run_simulated<A: Application + ?Sized>(
    shared: &RunShared<'_>,
    app: &A,
    mut warps: Vec<WarpState>,
    store: Option<&StoreProducer>,
    cfg: &EngineConfig,
    sim: SimConfig,
) -> Result<(Vec<WarpState>, BalanceStats, u64)> {
    let total = warps.len();
    let mut clock = vec![0u64; total];
    let mut finished_at: Vec<Option<u64>> = vec![None; total];
    let mut heap = BinaryHeap::new();
    for ws in &mut warps {
        let before = ws.ledger.lockstep_instructions;
        ws.prime(&shared.queue);
        clock[ws.id] = ws.ledger.lockstep_instructions - before;
        if ws.has_work() {
            heap.push(Reverse((clock[ws.id], ws.id)));
        } else {
            finished_at[ws.id] = Some(clock[ws.id]);
        }
    }

    let mut stats = BalanceStats::default();
    let mut futile_idle = 0;
    let mut next_poll = sim.poll_cycles;
    while let Some(&Reverse((now, _))) = heap.peek() {
        if cfg.balancing() && now >= next_poll {
            let t = next_poll;
            next_poll = (now / sim.poll_cycles + 1) * sim.poll_cycles;
            let active = heap.len() + finished_at.iter().filter(|f| f.is_some_and(|f| f > t)).count();
            let idle = total - active;
            if should_rebalance(active, total, &cfg.balance) && idle > futile_idle {
                let mut snapshot = Snapshot { warps, queue_cursor: shared.queue.cursor() };
                let moved = redistribute(&mut snapshot, shared.graph)?;
                note_rebalance(&mut stats, moved, idle, &mut futile_idle);
                warps = snapshot.warps;
                if moved > 0 {
                    heap.clear();
                    for ws in &warps {
                        if ws.has_work() {
                            clock[ws.id] = clock[ws.id].max(t) + sim.relaunch_cycles;
                            finished_at[ws.id] = None;
                            heap.push(Reverse((clock[ws.id], ws.id)));
                        }
                    }
                }
            }
            continue;
        }

        let Reverse((now, id)) = heap.pop().expect("peeked");
        let ws = &mut warps[id];
        let before = ws.ledger.lockstep_instructions;
        ws.step(app, shared, store)?;
        clock[id] = now + (ws.ledger.lockstep_instructions - before).max(1);
        if ws.has_work() {
            heap.push(Reverse((clock[id], id)));
        } else {
            finished_at[id] = Some(clock[id]);
        }
    }
    let makespan = finished_at.iter().map(|f| f.unwrap_or(0)).max().unwrap_or(0);
    Ok((warps, stats, makespan))
}
