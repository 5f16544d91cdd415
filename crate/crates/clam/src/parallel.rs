//! Deterministic chunked work distribution.
//!
//! Every parallel pass in this crate partitions its input into contiguous
//! chunks of a fixed size and merges the per-chunk results in chunk order.
//! The reduction shape depends only on the chunk index, never on thread
//! scheduling, so results are bit-identical for any worker count.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Condvar, Mutex};

/// Compute `f(0..n_chunks)` on up to `workers` threads and return generated
/// results indexed by chunk.
pub(crate) fn run_chunks<T, F>(n_chunks: usize, workers: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    let workers = workers.max(1).min(n_chunks.max(1));
    if workers <= 1 {
        return (0..n_chunks).map(f).collect();
    }
    let slots: Vec<Mutex<Option<T>>> = (0..n_chunks).map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= n_chunks {
                    break;
                }
                let value = f(i);
                *slots[i].lock().unwrap() = Some(value);
            });
        }
    });
    slots
        .into_iter()
        .map(|slot| slot.into_inner().unwrap().expect("chunk not computed"))
        .collect()
}

/// Like [`run_chunks`] but hands each result to `consume` in chunk order as
/// soon as it is available, holding at most `window` finished chunks in
/// memory. Workers stall rather than run arbitrarily far ahead of the
/// consumer.
pub(crate) fn run_chunks_ordered<T, E, F, C>(
    n_chunks: usize,
    workers: usize,
    window: usize,
    f: F,
    mut consume: C,
) -> Result<(), E>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
    C: FnMut(usize, T) -> Result<(), E>,
{
    let workers = workers.max(1).min(n_chunks.max(1));
    if workers <= 1 {
        for i in 0..n_chunks {
            consume(i, f(i))?;
        }
        return Ok(());
    }
    let window = window.max(workers);

    struct Shared<T> {
        slots: Vec<Mutex<Option<T>>>,
        filled: Mutex<Vec<bool>>,
        consumed: AtomicUsize,
        cond: Condvar,
    }
    let shared = Shared {
        slots: (0..n_chunks).map(|_| Mutex::new(None)).collect(),
        filled: Mutex::new(vec![false; n_chunks]),
        consumed: AtomicUsize::new(0),
        cond: Condvar::new(),
    };
    let next = AtomicUsize::new(0);

    let mut result: Result<(), E> = Ok(());
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= n_chunks {
                    break;
                }
                // stay within `window` of the consumer
                {
                    let mut filled = shared.filled.lock().unwrap();
                    while i >= shared.consumed.load(Ordering::Acquire) + window {
                        filled = shared.cond.wait(filled).unwrap();
                    }
                }
                let value = f(i);
                *shared.slots[i].lock().unwrap() = Some(value);
                let mut filled = shared.filled.lock().unwrap();
                filled[i] = true;
                drop(filled);
                shared.cond.notify_all();
            });
        }

        for i in 0..n_chunks {
            let value = {
                let mut filled = shared.filled.lock().unwrap();
                while !filled[i] {
                    filled = shared.cond.wait(filled).unwrap();
                }
                shared.slots[i].lock().unwrap().take().expect("filled chunk missing")
            };
            shared.consumed.store(i + 1, Ordering::Release);
            shared.cond.notify_all();
            if let Err(e) = consume(i, value) {
                result = Err(e);
                // let workers drain the remaining indices without consuming
                shared.consumed.store(n_chunks, Ordering::Release);
                shared.cond.notify_all();
                break;
            }
        }
        // unblock any worker still waiting for window space
        shared.consumed.store(n_chunks, Ordering::Release);
        shared.cond.notify_all();
    });
    result
}
