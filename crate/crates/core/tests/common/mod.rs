#![allow(dead_code)]

use std::path::PathBuf;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use wobbly::dataset::Dataset;
use wobbly::harness::profile;
use wobbly::load_csv;

/// Step-by-step transcription of the partitioning pseudocode, written
/// independently of the library: plain Euclidean distances with square
/// roots, set removal by value, means recomputed from scratch every time.
pub fn desk_oracle(points: &[Vec<f64>], k: usize) -> Vec<Vec<usize>> {
    let n = points.len();
    let dim = points[0].len();
    let dist = |a: &[f64], b: &[f64]| -> f64 {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).powi(2))
            .sum::<f64>()
            .sqrt()
    };
    let mean_of = |members: &[usize]| -> Vec<f64> {
        (0..dim)
            .map(|j| {
                let mut s = 0.0;
                for &i in members {
                    s += points[i][j];
                }
                s / members.len() as f64
            })
            .collect()
    };

    // S, the points not yet assigned (ascending index)
    let mut s: Vec<usize> = (0..n).collect();
    let mut clusters: Vec<Vec<usize>> = vec![Vec::new(); k];

    let m = mean_of(&s);
    for c in clusters.iter_mut() {
        let mut x_min = s[0];
        for &x in &s {
            if dist(&points[x], &m) < dist(&points[x_min], &m) {
                x_min = x;
            }
        }
        c.push(x_min);
        s.retain(|&x| x != x_min);
    }

    while !s.is_empty() {
        for c in clusters.iter_mut() {
            if s.is_empty() {
                break;
            }
            let m_i = mean_of(c);
            let mut x_max = s[0];
            for &x in &s {
                if dist(&points[x], &m_i) > dist(&points[x_max], &m_i) {
                    x_max = x;
                }
            }
            c.push(x_max);
            s.retain(|&x| x != x_max);
        }
    }
    clusters
}

/// Deterministic generator of small random datasets for oracle sweeps.
pub struct DataGen(ChaCha8Rng);

impl DataGen {
    pub fn new(seed: u64) -> Self {
        Self(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn unit(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.unit() * n as f64) as usize
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.unit()
    }

    pub fn points(&mut self, n: usize, dim: usize) -> Vec<Vec<f64>> {
        (0..n)
            .map(|_| (0..dim).map(|_| self.uniform(-3.0, 3.0)).collect())
            .collect()
    }
}

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

pub fn load_profile(name: &str) -> Dataset {
    let p = profile(name).expect("known profile");
    let (d, _) = load_csv(&p.path_in(&data_dir()), &p.ingest_options()).expect("dataset loads");
    d
}
