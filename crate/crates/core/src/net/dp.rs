use super::{Net, NetBuilder, NetError};

/// Dining philosophers with `k` philosophers sitting around `k` forks.
///
/// Philosopher `i` owns places `think_i`, `hasL_i`, `eat_i` and fork `fork_i`
/// on its left; its right fork is `fork_{(i+1) mod k}`.
///
/// ```text
/// takeL_i:   think_i, fork_i        -> hasL_i
/// takeR_i:   hasL_i,  fork_{i+1}    -> eat_i
/// release_i: eat_i                  -> think_i, fork_i, fork_{i+1}
/// ```
///
/// Everybody starts thinking with every fork on the table. The only dead
/// marking is the one where every philosopher holds its left fork.
pub fn dining_philosophers(k: usize) -> Result<Net, NetError> {
    if k < 2 {
        return Err(NetError::InvalidParameter(format!(
            "dining philosophers needs at least 2 philosophers, got {k}"
        )));
    }
    let mut b = NetBuilder::new();
    for i in 0..k {
        b.place(format!("think_{i}"))
            .place(format!("hasL_{i}"))
            .place(format!("eat_{i}"))
            .place(format!("fork_{i}"));
    }
    for i in 0..k {
        let right = (i + 1) % k;
        b.transition(format!("takeL_{i}"))
            .transition(format!("takeR_{i}"))
            .transition(format!("release_{i}"));
        b.arc(format!("think_{i}"), format!("takeL_{i}"))
            .arc(format!("fork_{i}"), format!("takeL_{i}"))
            .arc(format!("takeL_{i}"), format!("hasL_{i}"));
        b.arc(format!("hasL_{i}"), format!("takeR_{i}"))
            .arc(format!("fork_{right}"), format!("takeR_{i}"))
            .arc(format!("takeR_{i}"), format!("eat_{i}"));
        b.arc(format!("eat_{i}"), format!("release_{i}"))
            .arc(format!("release_{i}"), format!("think_{i}"))
            .arc(format!("release_{i}"), format!("fork_{i}"))
            .arc(format!("release_{i}"), format!("fork_{right}"));
        b.mark(format!("think_{i}")).mark(format!("fork_{i}"));
    }
    b.build()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes() {
        let net = dining_philosophers(2).unwrap();
        assert_eq!(net.num_places(), 8);
        assert_eq!(net.num_transitions(), 6);
        assert_eq!(net.initial_marking().len(), 4);
        assert!(dining_philosophers(1).is_err());
    }

    #[test]
    fn one_safe_for_small_tables() {
        for k in 2..=8 {
            let report = dining_philosophers(k).unwrap().assert_one_safe(1_000_000);
            assert!(report.is_one_safe(), "k={k}: {report:?}");
        }
    }

    #[test]
    fn reachable_state_counts() {
        // Each philosopher is in one of think / hasL / eat with forks
        // determined by neighbours; brute force over the small tables.
        let net = dining_philosophers(3).unwrap();
        let reach = net
            .reachable_markings(net.initial_marking(), super::super::Semantics::Interleaving, 1000)
            .unwrap();
        let dead: Vec<_> = reach.iter().filter(|m| net.deadlocked(m)).collect();
        assert_eq!(dead.len(), 1);
        let names = net.marking_names(dead[0]);
        assert_eq!(names, ["hasL_0", "hasL_1", "hasL_2"]);
    }
}
