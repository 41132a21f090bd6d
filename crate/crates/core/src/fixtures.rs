//! Small hand-built meshes with known trees, plus seeded random terrains.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::mesh::ScalarMesh;

pub const TP_P1: u32 = 0;
pub const TP_P2: u32 = 1;
pub const TP_S: u32 = 2;
pub const TP_RING: u32 = 3;

/// Apex 0 (h=10) over the boundary triangle {1,2,3} (h=0), facet included.
pub fn cone() -> ScalarMesh {
    ScalarMesh::new(
        vec![10.0, 0.0, 0.0, 0.0],
        vec![[0, 1, 2], [0, 2, 3], [0, 3, 1], [1, 2, 3]],
        vec![vec![1, 2, 3]],
    )
    .expect("cone")
}

/// Peaks p1 (5) and p2 (4) joined at saddle s (3) inside a square ring (0).
pub fn twin_peaks() -> ScalarMesh {
    let (p1, p2, s) = (0, 1, 2);
    let (b0, b1, b2, b3) = (3, 4, 5, 6);
    ScalarMesh::new(
        vec![5.0, 4.0, 3.0, 0.0, 0.0, 0.0, 0.0],
        vec![
            [s, p1, b0],
            [s, b0, b1],
            [s, b1, p2],
            [s, p2, b2],
            [s, b2, b3],
            [s, b3, p1],
            [p1, b0, b3],
            [p2, b1, b2],
        ],
        vec![vec![b0, b1, b2, b3]],
    )
    .expect("twin peaks")
}

pub const CR_PIT: u32 = 0;
pub const CR_R0: u32 = 1;
pub const CR_R1: u32 = 2;
pub const CR_R2: u32 = 3;
pub const CR_R3: u32 = 4;
pub const CR_RING: u32 = 5;

/// Rim r0..r3 (10, 6, 9, 7) around a pit (-5) that sits below the outer
/// ground (0): one join (r3) and one split (r1).
pub fn crater() -> ScalarMesh {
    let c = 0u32;
    let r = [1u32, 2, 3, 4];
    let b = [5u32, 6, 7, 8];
    let mut faces = Vec::new();
    for i in 0..4 {
        let j = (i + 1) % 4;
        faces.push([c, r[i], r[j]]);
        faces.push([r[i], b[i], b[j]]);
        faces.push([r[i], b[j], r[j]]);
    }
    ScalarMesh::new(
        vec![-5.0, 10.0, 6.0, 9.0, 7.0, 0.0, 0.0, 0.0, 0.0],
        faces,
        vec![b.to_vec()],
    )
    .expect("crater")
}

/// Vertex 0 (h=5) whose hexagonal link alternates high/low three times.
pub fn monkey_saddle() -> ScalarMesh {
    let hex_h = [8.0, 2.0, 9.0, 3.0, 10.0, 1.0];
    let h: Vec<u32> = (1..=6).collect();
    let b: Vec<u32> = (7..=12).collect();
    let mut heights = vec![5.0];
    heights.extend(hex_h);
    heights.extend([0.0; 6]);
    let mut faces = Vec::new();
    for i in 0..6 {
        let j = (i + 1) % 6;
        faces.push([0, h[i], h[j]]);
        faces.push([h[i], b[i], b[j]]);
        faces.push([h[i], b[j], h[j]]);
    }
    ScalarMesh::new(heights, faces, vec![b]).expect("monkey saddle")
}

/// Three-row shelf terrain: a high mountain whose slope holds `k` pits,
/// joined at one saddle to a ridge carrying `k` peaks.
pub fn staircase_values(k: usize) -> (usize, usize, Vec<f64>) {
    let cols = 4 * k + 3;
    let rows = 3;
    let mut v = vec![0.0; rows * cols];
    let y = 2 * k + 1;
    for c in 0..cols {
        let flank = if c <= 2 * k { 1000.0 - 2.0 * c as f64 } else { 10.0 + 0.01 * c as f64 };
        v[c] = flank;
        v[2 * cols + c] = flank;
        let mid = if c == 0 {
            2000.0
        } else if c < y {
            if c % 2 == 1 {
                flank - 500.0
            } else {
                flank - 1.0
            }
        } else if c == y {
            500.0
        } else if (c - y - 1).is_multiple_of(2) {
            600.0 + c as f64
        } else {
            550.0 + 0.1 * c as f64
        };
        v[cols + c] = mid;
    }
    (rows, cols, v)
}

pub fn staircase(k: usize) -> ScalarMesh {
    let (r, c, v) = staircase_values(k);
    ScalarMesh::grid(r, c, &v).expect("staircase")
}

/// Heights for a seeded random grid. Odd seeds draw from a small integer
/// range so that ties (resolved by id) are common.
pub fn random_grid_values(rows: usize, cols: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rows * cols;
    if seed % 2 == 1 {
        let range = (n / 3).max(2) as i64;
        (0..n).map(|_| rng.gen_range(0..range) as f64).collect()
    } else {
        (0..n).map(|_| (rng.gen::<f64>() * 1000.0).round() / 10.0).collect()
    }
}

pub fn random_grid(rows: usize, cols: usize, seed: u64) -> ScalarMesh {
    ScalarMesh::grid(rows, cols, &random_grid_values(rows, cols, seed)).expect("random grid")
}

/// Grid size for corpus instance `i`: cycles through 6x6..10x10.
pub fn corpus_dims(i: u64) -> (usize, usize) {
    let r = 6 + (i % 5) as usize;
    let c = 6 + ((i / 5) % 5) as usize;
    (r, c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_validate() {
        cone();
        twin_peaks();
        crater();
        monkey_saddle();
        for k in [1, 4, 16] {
            staircase(k);
        }
    }

    #[test]
    fn random_is_deterministic() {
        assert_eq!(random_grid_values(5, 5, 3), random_grid_values(5, 5, 3));
        assert_ne!(random_grid_values(5, 5, 3), random_grid_values(5, 5, 4));
    }
}
