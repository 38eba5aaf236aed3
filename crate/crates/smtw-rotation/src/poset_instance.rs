use smtw_instance::Instance;

/// An instance whose rotation digraph is the transitive reduction of the
/// given DAG on `k` rotations. Arcs `(a, b)` mean `a` must come before `b`.
///
/// Rotation `i` uses men `m_i = 2i`, `m̂_i = 2i+1` and women `w_i = 2i`,
/// `ŵ_i = 2i+1`:
///
/// ```text
/// m_i : w_i, w_a for every arc (a, i), ŵ_i
/// m̂_i : ŵ_i, w_i
/// w_i : m̂_i, m_b for every arc (i, b), m_i
/// ŵ_i : m_i, m̂_i
/// ```
///
/// While some `w_a` still holds `m_a` she accepts `m_i`, which keeps the
/// rotation `((m_i,w_i),(m̂_i,ŵ_i))` unexposed until every such `a` is eliminated.
///
/// # Panics
/// If an arc names a missing rotation, arcs repeat or the arcs contain a cycle.
pub fn instance_for_dag(k: usize, arcs: &[(usize, usize)]) -> Instance {
    let mut preds = vec![Vec::new(); k];
    let mut succs = vec![Vec::new(); k];
    for &(a, b) in arcs {
        assert!(a < k && b < k && a != b, "bad arc ({a}, {b})");
        preds[b].push(a);
        succs[a].push(b);
    }
    let (m, mh) = (|i: usize| 2 * i, |i: usize| 2 * i + 1);
    let (w, wh) = (m, mh);
    let mut men = vec![Vec::new(); 2 * k];
    let mut women = vec![Vec::new(); 2 * k];
    for i in 0..k {
        let mut ps = preds[i].clone();
        ps.sort_unstable();
        let mut ss = succs[i].clone();
        ss.sort_unstable();
        men[m(i)] = std::iter::once(w(i))
            .chain(ps.iter().map(|&a| w(a)))
            .chain(std::iter::once(wh(i)))
            .collect();
        men[mh(i)] = vec![wh(i), w(i)];
        women[w(i)] = std::iter::once(mh(i))
            .chain(ss.iter().map(|&b| m(b)))
            .chain(std::iter::once(m(i)))
            .collect();
        women[wh(i)] = vec![m(i), mh(i)];
    }
    let inst = Instance::strict(men, women).expect("symmetric by construction");
    assert!(topological(k, &succs), "arcs contain a cycle");
    inst
}

fn topological(k: usize, succs: &[Vec<usize>]) -> bool {
    let mut indeg = vec![0usize; k];
    for s in succs {
        for &b in s {
            indeg[b] += 1;
        }
    }
    let mut stack: Vec<usize> = (0..k).filter(|&i| indeg[i] == 0).collect();
    let mut seen = 0;
    while let Some(x) = stack.pop() {
        seen += 1;
        for &b in &succs[x] {
            indeg[b] -= 1;
            if indeg[b] == 0 {
                stack.push(b);
            }
        }
    }
    seen == k
}
