//! The memory-transaction model on its own: a warp reading consecutive
//! elements touches one segment, lanes reading far apart touch one each.

use warpmine::metrics::{ArrayId, CoalescenceLedger, LedgerMode};

fn main() {
    let mut warp = CoalescenceLedger::new(LedgerMode::Lockstep, 32);
    warp.record_access(ArrayId::Adjacency, 0..32);
    warp.record_instruction(32);
    println!("32 lanes, consecutive:     {} transaction(s), {} instruction(s)", warp.load_transactions, warp.lockstep_instructions);

    let mut strided = CoalescenceLedger::new(LedgerMode::Lockstep, 32);
    strided.record_access(ArrayId::Adjacency, (0..32).map(|i| i * 64));
    println!("32 lanes, stride 64:       {} transaction(s)", strided.load_transactions);

    let mut partial = CoalescenceLedger::new(LedgerMode::Lockstep, 32);
    partial.record_access(ArrayId::Extensions(0), 40..56);
    partial.record_instruction(16);
    println!("16 lanes, elements 40..56: {} transaction(s), {} instruction(s)", partial.load_transactions, partial.lockstep_instructions);

    let mut lanes = CoalescenceLedger::new(LedgerMode::PerLane, 32);
    for i in 0..32 {
        lanes.record_access(ArrayId::Adjacency, [i * 64]);
        lanes.record_instruction(1);
    }
    println!("32 independent lanes:      {} transaction(s), {} instruction(s)", lanes.load_transactions, lanes.lockstep_instructions);
}
