//! FIFO frame queue drained as a fluid at the link capacity.

use std::collections::VecDeque;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OverflowPolicy {
    /// Reject the arriving frame.
    DropNewest,
    /// Evict waiting frames from the head until the arrival fits. A frame
    /// already on the air is never evicted.
    DropOldest,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QueuePolicy {
    pub max_queue_bits: f64,
    /// A frame still waiting this long after generation is discarded.
    pub frame_deadline_s: f64,
    pub overflow: OverflowPolicy,
}

impl QueuePolicy {
    pub const DEFAULT_DEADLINE_S: f64 = 1.0;

    pub fn new(max_queue_bits: f64) -> Self {
        Self { max_queue_bits, frame_deadline_s: Self::DEFAULT_DEADLINE_S, overflow: OverflowPolicy::DropNewest }
    }
}

#[derive(Debug, Clone)]
struct QueuedFrame {
    gen_s: f64,
    bits: f64,
    remaining: f64,
    started: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Delivery {
    pub gen_s: f64,
    pub done_s: f64,
    pub bits: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub(crate) struct Drops {
    pub deadline: u64,
    pub overflow: u64,
}

#[derive(Debug)]
pub(crate) struct FluidQueue {
    policy: QueuePolicy,
    frames: VecDeque<QueuedFrame>,
    pub drops: Drops,
}

impl FluidQueue {
    pub fn new(policy: QueuePolicy) -> Self {
        Self { policy, frames: VecDeque::new(), drops: Drops::default() }
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    #[cfg(test)]
    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn bits(&self) -> f64 {
        self.frames.iter().map(|f| f.remaining).sum()
    }

    /// Offer a frame of `bits` generated at `gen_s`. Returns false if dropped.
    pub fn enqueue(&mut self, gen_s: f64, bits: f64) -> bool {
        let limit = self.policy.max_queue_bits;
        if self.bits() + bits > limit && self.policy.overflow == OverflowPolicy::DropOldest {
            // The head may be on the air; evict the oldest waiting frames.
            loop {
                if self.bits() + bits <= limit {
                    break;
                }
                let victim = self.frames.iter().position(|f| !f.started);
                match victim {
                    Some(i) => {
                        self.frames.remove(i);
                        self.drops.overflow += 1;
                    }
                    None => break,
                }
            }
        }
        if self.bits() + bits > limit {
            self.drops.overflow += 1;
            return false;
        }
        self.frames.push_back(QueuedFrame { gen_s, bits, remaining: bits, started: false });
        true
    }

    /// Drain at constant `capacity_bps` from `from_s` to `to_s`.
    ///
    /// A frame whose age exceeds the deadline when it reaches the head is
    /// dropped instead of started; once started it always completes.
    /// Returns the bits put on the air.
    pub fn drain(&mut self, from_s: f64, to_s: f64, capacity_bps: f64, delivered: &mut Vec<Delivery>) -> f64 {
        let mut now = from_s;
        let mut sent = 0.0;
        while now < to_s {
            let Some(head) = self.frames.front_mut() else { break };
            if !head.started {
                if now - head.gen_s > self.policy.frame_deadline_s {
                    self.frames.pop_front();
                    self.drops.deadline += 1;
                    continue;
                }
                if capacity_bps <= 0.0 {
                    break;
                }
                head.started = true;
            }
            if capacity_bps <= 0.0 {
                break;
            }
            let needed_s = head.remaining / capacity_bps;
            if now + needed_s <= to_s {
                now += needed_s;
                sent += head.remaining;
                delivered.push(Delivery { gen_s: head.gen_s, done_s: now, bits: head.bits });
                self.frames.pop_front();
            } else {
                let chunk = (capacity_bps * (to_s - now)).min(head.remaining);
                head.remaining -= chunk;
                sent += chunk;
                now = to_s;
            }
        }
        sent
    }

    /// Drop every waiting frame older than the deadline at `now_s`.
    pub fn expire(&mut self, now_s: f64) {
        let deadline = self.policy.frame_deadline_s;
        let before = self.frames.len();
        self.frames.retain(|f| f.started || now_s - f.gen_s <= deadline);
        self.drops.deadline += (before - self.frames.len()) as u64;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn policy(max: f64, overflow: OverflowPolicy) -> QueuePolicy {
        QueuePolicy { max_queue_bits: max, frame_deadline_s: 1.0, overflow }
    }

    #[test]
    fn drains_in_order_with_exact_completion_times() {
        let mut q = FluidQueue::new(policy(1e9, OverflowPolicy::DropNewest));
        assert!(q.enqueue(0.0, 100.0));
        assert!(q.enqueue(0.0, 50.0));
        let mut out = Vec::new();
        let sent = q.drain(0.0, 1.0, 120.0, &mut out);
        assert_eq!(out.len(), 1);
        assert!((out[0].done_s - 100.0 / 120.0).abs() < 1e-12);
        assert!((sent - 120.0).abs() < 1e-9);
        assert!((q.bits() - 30.0).abs() < 1e-9);
        q.drain(1.0, 2.0, 120.0, &mut out);
        assert_eq!(out.len(), 2);
        assert!((out[1].done_s - 1.25).abs() < 1e-12);
        assert!(q.is_empty());
    }

    #[test]
    fn overflow_policies() {
        let mut q = FluidQueue::new(policy(250.0, OverflowPolicy::DropNewest));
        assert!(q.enqueue(0.0, 100.0));
        assert!(q.enqueue(0.1, 100.0));
        assert!(!q.enqueue(0.2, 100.0));
        assert_eq!(q.drops.overflow, 1);
        assert_eq!(q.len(), 2);

        let mut q = FluidQueue::new(policy(250.0, OverflowPolicy::DropOldest));
        q.enqueue(0.0, 100.0);
        q.drain(0.0, 0.5, 100.0, &mut Vec::new());
        q.enqueue(0.1, 100.0);
        // 50 on air + 100 waiting + 120 arriving > 250.
        assert!(q.enqueue(0.2, 120.0));
        // The on-air head survives; the waiting frame from 0.1 s is evicted.
        assert_eq!(q.drops.overflow, 1);
        assert_eq!(q.len(), 2);
        // Larger than the whole buffer.
        assert!(!q.enqueue(0.3, 1000.0));
    }

    #[test]
    fn deadline_drops_waiting_frames_only() {
        let mut q = FluidQueue::new(policy(1e9, OverflowPolicy::DropNewest));
        q.enqueue(0.0, 100.0);
        q.enqueue(0.0, 100.0);
        let mut out = Vec::new();
        // Zero capacity for 2 s: nothing starts.
        q.drain(0.0, 2.0, 0.0, &mut out);
        q.expire(2.0);
        assert_eq!(q.drops.deadline, 2);
        assert!(q.is_empty());

        q.enqueue(2.0, 100.0);
        q.drain(2.0, 2.5, 100.0, &mut out);
        // Started before its deadline, completes late anyway.
        q.drain(2.5, 4.0, 0.0, &mut out);
        q.expire(4.0);
        q.drain(4.0, 5.0, 100.0, &mut out);
        assert_eq!(out.len(), 1);
        assert_eq!(q.drops.deadline, 2);
    }
}
