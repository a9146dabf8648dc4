//! Randomized invariants for the rank/polytope layer.

use fejer_core::graphs::*;
use fejer_core::numeric::exact;
use fejer_core::{to_big, Rat, SpectralDomain};
use proptest::prelude::*;

fn small_matrix() -> impl Strategy<Value = IncidenceMatrix> {
    (1usize..=3, 1usize..=5)
        .prop_flat_map(|(v, e)| {
            proptest::collection::vec(proptest::collection::vec(-2i64..=2, e), v)
        })
        .prop_map(|rows| IncidenceMatrix::from_rows(rows).unwrap())
}

fn small_graph() -> impl Strategy<Value = IncidenceMatrix> {
    (2usize..=5)
        .prop_flat_map(|v| {
            let edge = (0..v, 0..v).prop_filter_map("loopless", |(a, b)| {
                if a == b {
                    None
                } else {
                    Some((a, b))
                }
            });
            (Just(v), proptest::collection::vec(edge, 1..=6))
        })
        .prop_map(|(v, edges)| IncidenceMatrix::from_edge_list(v, &edges).unwrap())
}

fn exponents(e: usize) -> impl Strategy<Value = Vec<Rat>> {
    proptest::collection::vec((0i64..=4).prop_map(|n| Rat::new(n, 4)), e)
}

fn bfs_components(v: usize, edges: &[(usize, usize)]) -> usize {
    let mut adj = vec![Vec::new(); v];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut seen = vec![false; v];
    let mut comps = 0;
    for s in 0..v {
        if seen[s] {
            continue;
        }
        comps += 1;
        let mut queue = vec![s];
        seen[s] = true;
        while let Some(u) = queue.pop() {
            for &w in &adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push(w);
                }
            }
        }
    }
    comps
}

proptest! {
    #[test]
    fn rank_axioms(m in small_matrix(), seed in any::<u32>()) {
        let full = m.full_set();
        let a = seed & full;
        let b = (seed >> 8) & full;
        let ra = m.rank_subset(a).unwrap();
        let rb = m.rank_subset(b).unwrap();
        let runion = m.rank_subset(a | b).unwrap();
        let rinter = m.rank_subset(a & b).unwrap();
        prop_assert_eq!(m.rank_subset(0).unwrap(), 0);
        prop_assert!(ra <= a.count_ones() as usize);
        prop_assert!(runion >= ra.max(rb), "monotone");
        prop_assert!(runion + rinter <= ra + rb, "submodular");
        for e in 0..m.e() {
            let re = m.rank_subset(a | (1 << e)).unwrap();
            prop_assert!(re == ra || re == ra + 1, "unit increase");
        }
    }

    #[test]
    fn duality_matches_dual_matrix(m in small_matrix()) {
        if m.rank() == 0 {
            return Ok(());
        }
        let dual = dual_matrix(&m).unwrap();
        prop_assert_eq!(dual.rows(), m.cycle_dim());
        for row in &dual.entries {
            for prim in m.entries() {
                let dot: i64 = prim.iter().zip(row).map(|(&x, &y)| x * y).sum();
                prop_assert_eq!(dot, 0);
            }
        }
        for a in 0..=m.full_set() {
            prop_assert_eq!(m.dual_rank(a).unwrap(), dual.rank_subset(a).unwrap());
        }
        // Complement of the dual rank of everything recovers the rank.
        prop_assert_eq!(m.rank() + m.dual_rank(m.full_set()).unwrap(), m.e());
    }

    #[test]
    fn alpha_forms_and_line_case(m in small_matrix(), z_seed in proptest::collection::vec(0i64..=4, 5)) {
        let z: Vec<Rat> = (0..m.e()).map(|e| Rat::new(z_seed[e % z_seed.len()], 4)).collect();
        let (by_rank, by_comp) = alpha_discrete_forms(&m, &z).unwrap();
        prop_assert_eq!(by_rank, by_comp);
        let co = Rat::new(m.co() as i64, 1);
        let total: Rat = z.iter().copied().sum();
        let excess = total - Rat::new(m.cycle_dim() as i64, 1);
        let want = if excess > Rat::new(0, 1) { co + excess } else { co };
        prop_assert_eq!(alpha_exponent(&m, &z, PcpCase::Lebesgue).unwrap(), want);
        // Exact-limit condition holds iff the growth exponent stays at co(M).
        let flat = szego_condition(&m, &z, SpectralDomain::Torus).unwrap().member;
        prop_assert_eq!(flat, by_rank == co);
        let flat_line = szego_condition(&m, &z, SpectralDomain::Line).unwrap().member;
        prop_assert_eq!(flat_line, want == co);
    }

    #[test]
    fn graph_rank_equals_component_deficit(g in small_graph(), seed in any::<u32>()) {
        let full = g.full_set();
        let a = seed & full;
        // The union-find path must agree with fraction-free elimination.
        let general = IncidenceMatrix::general_from_rows(g.entries().to_vec()).unwrap();
        prop_assert_eq!(g.rank_subset(a).unwrap(), general.rank_subset(a).unwrap());
        // Component counts after removal match a breadth-first search.
        let edges = g.edge_list().unwrap();
        let kept: Vec<(usize, usize)> = edges
            .iter()
            .enumerate()
            .filter(|(c, _)| a >> *c & 1 == 0)
            .map(|(_, &p)| p)
            .collect();
        prop_assert_eq!(
            g.components_after_removal(a).unwrap(),
            bfs_components(g.v(), &kept)
        );
    }

    #[test]
    fn membership_agrees_with_hull(m in small_matrix(), z in exponents(5), case_pick in 0u8..3) {
        if m.e() > 5 {
            return Ok(());
        }
        let z = &z[..m.e()];
        let case = [PcpCase::Torus, PcpCase::Counting, PcpCase::Lebesgue][case_pick as usize];
        let by_ranks = pcp_membership(&m, z, case).unwrap().member;
        let verts: Vec<Vec<fejer_core::BigRat>> = pcp_vertices(&m, case)
            .unwrap()
            .iter()
            .map(|v| v.iter().map(|&x| to_big(x)).collect())
            .collect();
        let target: Vec<fejer_core::BigRat> = z.iter().map(|&x| to_big(x)).collect();
        prop_assert_eq!(by_ranks, exact::in_convex_hull(&verts, &target));
    }
}
