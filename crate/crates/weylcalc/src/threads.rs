//! Scoped-thread parallel map with the thread count capped by the
//! `WEYLCALC_THREADS` environment variable. Results come back in input
//! order, so reductions stay deterministic regardless of the cap.

pub fn max_threads() -> usize {
    if let Ok(v) = std::env::var("WEYLCALC_THREADS") {
        if let Ok(n) = v.trim().parse::<usize>() {
            return n.max(1);
        }
    }
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}

/// Apply `f` to every item, possibly in parallel, preserving order.
pub fn par_map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync,
{
    let threads = max_threads().min(items.len().max(1));
    if threads <= 1 || items.len() < 2 {
        return items.iter().map(&f).collect();
    }
    let chunk = items.len().div_ceil(threads);
    let mut out: Vec<Option<U>> = Vec::with_capacity(items.len());
    out.resize_with(items.len(), || None);
    let slots: Vec<(usize, &[T])> = items.chunks(chunk).enumerate().collect();
    std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for (i, sl) in &slots {
            let f = &f;
            handles.push((
                i * chunk,
                scope.spawn(move || sl.iter().map(f).collect::<Vec<U>>()),
            ));
        }
        for (offset, h) in handles {
            for (k, v) in h.join().expect("worker panicked").into_iter().enumerate() {
                out[offset + k] = Some(v);
            }
        }
    });
    out.into_iter().map(|v| v.unwrap()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preserves_order() {
        let items: Vec<usize> = (0..1000).collect();
        let out = par_map(&items, |&x| x * 2);
        for (i, v) in out.iter().enumerate() {
            assert_eq!(*v, 2 * i);
        }
    }

    #[test]
    fn respects_env_cap() {
        std::env::set_var("WEYLCALC_THREADS", "1");
        assert_eq!(max_threads(), 1);
        std::env::remove_var("WEYLCALC_THREADS");
    }
}
