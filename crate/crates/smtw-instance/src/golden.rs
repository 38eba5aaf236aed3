//! Small fixed instances used across the test suites.

use crate::Instance;

/// Two men and two women with two stable matchings.
/// m1: w1 > w2, m2: w2 > w1, w1: m2 > m1, w2: m1 > m2.
pub fn i2() -> Instance {
    Instance::strict(vec![vec![0, 1], vec![1, 0]], vec![vec![1, 0], vec![0, 1]]).expect("valid")
}

/// Three men and three women with cyclic lists and three stable matchings.
/// `m_i` ranks `w_i, w_{i+1}, w_{i+2}` and `w_i` ranks `m_{i+1}, m_{i+2}, m_i`.
pub fn i3() -> Instance {
    let men = (0..3)
        .map(|i| (0..3).map(|k| (i + k) % 3).collect())
        .collect();
    let women = (0..3)
        .map(|i| (1..4).map(|k| (i + k) % 3).collect())
        .collect();
    Instance::strict(men, women).expect("valid")
}

/// A tied instance whose weakly stable matchings have sizes 1 and 2.
/// m1: w1, m2: w1 > w2, w1: (m1 m2), w2: m2.
pub fn i_t() -> Instance {
    Instance::from_groups(
        vec![vec![vec![0]], vec![vec![0], vec![1]]],
        vec![vec![vec![0, 1]], vec![vec![1]]],
    )
    .expect("valid")
}

/// One man and one woman who accept each other.
pub fn one_by_one() -> Instance {
    Instance::strict(vec![vec![0]], vec![vec![0]]).expect("valid")
}

/// All golden instances with short names.
pub fn all() -> Vec<(&'static str, Instance)> {
    vec![
        ("i2", i2()),
        ("i3", i3()),
        ("it", i_t()),
        ("1x1", one_by_one()),
    ]
}
