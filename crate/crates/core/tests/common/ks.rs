//! Brute-force Kochen-Specker oracle working on raw integer rays.

/// Number of 0/1 assignments to the distinct rays giving exactly one 1 in
/// every basis, over all `2^rays` assignments. Rays are identified up to
/// sign.
pub fn count_colourings(bases: &[Vec<Vec<i64>>]) -> usize {
    let mut rays: Vec<Vec<i64>> = Vec::new();
    let canon = |v: &[i64]| {
        let lead = v.iter().find(|&&x| x != 0).copied().unwrap_or(1).signum();
        v.iter().map(|x| x * lead).collect::<Vec<_>>()
    };
    let masks: Vec<u64> = bases
        .iter()
        .map(|b| {
            b.iter().fold(0u64, |m, v| {
                let c = canon(v);
                let i = rays.iter().position(|r| *r == c).unwrap_or_else(|| {
                    rays.push(c);
                    rays.len() - 1
                });
                m | (1 << i)
            })
        })
        .collect();
    assert!(rays.len() <= 24, "oracle is exhaustive; {} rays is too many", rays.len());
    (0u64..(1 << rays.len())).filter(|c| masks.iter().all(|m| (c & m).count_ones() == 1)).count()
}
