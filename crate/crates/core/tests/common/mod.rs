#![allow(dead_code)]

use std::io::Write;
use std::path::Path;
use std::process::{Command, Output};

use credalk_core::cli::{parse_model, Model};
use credalk_core::exactq::{format_rational, ratio, QVector, Rational};
use credalk_core::polytope::{self, Polytope};
use credalk_core::spaces::{IndexTuple, ProcessSpace};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn labels(k: usize) -> Vec<String> {
    ["a", "b", "c", "d"][..k].iter().map(|s| s.to_string()).collect()
}

/// A point of the `dim`-simplex with coordinates `n_i / den`, `Σ n_i = den`.
pub fn composition(rng: &mut ChaCha8Rng, dim: usize, den: i64) -> QVector {
    let mut counts = vec![0i64; dim];
    for _ in 0..den {
        counts[rng.gen_range(0..dim)] += 1;
    }
    counts.into_iter().map(|n| ratio(n, den)).collect()
}

pub fn random_simplex_points(rng: &mut ChaCha8Rng, dim: usize, count: usize) -> Vec<QVector> {
    (0..count)
        .map(|_| {
            let den = rng.gen_range(1..=12);
            composition(rng, dim, den)
        })
        .collect()
}

/// A generated consistent family: `V_α` is the image of a random polytope
/// `P₀` in the Ω-simplex, for every ascending tuple.
pub struct Instance {
    pub space: ProcessSpace,
    pub p0: Polytope,
    pub images: Vec<(IndexTuple, Vec<QVector>)>,
    pub json: String,
}

impl Instance {
    pub fn model(&self) -> Model {
        parse_model(&self.json).expect("generated model parses")
    }
}

pub fn vector_json(v: &[Rational]) -> Value {
    Value::Array(v.iter().map(|q| json!(format_rational(q))).collect())
}

pub fn model_json(space: &ProcessSpace, sets: &[(IndexTuple, Vec<QVector>)]) -> String {
    let entries: Vec<Value> = sets
        .iter()
        .map(|(t, vs)| {
            json!({
                "tuple": space.tuple_labels(t),
                "mode": "polytope-v",
                "vertices": vs.iter().map(|v| vector_json(v)).collect::<Vec<_>>(),
            })
        })
        .collect();
    serde_json::to_string_pretty(&json!({
        "Y": space.outcome_labels(),
        "T": space.index_labels(),
        "credal_sets": entries,
    }))
    .unwrap()
}

pub fn random_instance(rng: &mut ChaCha8Rng, k: usize) -> Instance {
    let space = ProcessSpace::new(labels(k), vec!["0".into(), "1".into()]).unwrap();
    let n = rng.gen_range(4..=8);
    let pts = random_simplex_points(rng, space.omega_dim(), n);
    let p0 = Polytope::from_points_reduced(space.omega_dim(), pts).unwrap();
    let images: Vec<(IndexTuple, Vec<QVector>)> = space
        .canonical_tuples()
        .into_iter()
        .map(|t| {
            let m = space.phi_matrix(&t).unwrap();
            let img = polytope::linear_image(&m, &p0).unwrap();
            (t, img.vertices().unwrap().to_vec())
        })
        .collect();
    let json = model_json(&space, &images);
    Instance {
        space,
        p0,
        images,
        json,
    }
}

pub fn write_model(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    let mut f = std::fs::File::create(&p).unwrap();
    f.write_all(text.as_bytes()).unwrap();
    p
}

pub fn credalk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_credalk"))
        .args(args)
        .output()
        .expect("credalk runs")
}

pub fn data(name: &str) -> String {
    format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

// Oracles below use only elementary arithmetic on `Rational`, not the
// library's linear algebra or LP code.

/// Marginal of `v` (over `Y^|alpha|`, first coordinate most significant)
/// onto the positions `beta`, each of which must occur in `alpha`.
pub fn marginal(v: &[Rational], alpha: &[usize], beta: &[usize], ny: usize) -> QVector {
    let n = alpha.len();
    let mut out = vec![Rational::from_integer(0.into()); ny.pow(beta.len() as u32)];
    for (x, mass) in v.iter().enumerate() {
        let mut digits = vec![0; n];
        let mut r = x;
        for d in digits.iter_mut().rev() {
            *d = r % ny;
            r /= ny;
        }
        let mut idx = 0;
        for b in beta {
            let at = alpha.iter().position(|a| a == b).expect("beta inside alpha");
            idx = idx * ny + digits[at];
        }
        out[idx] += mass;
    }
    QVector::new(out)
}

/// Product of per-index marginals, first factor most significant.
pub fn product(factors: &[QVector]) -> QVector {
    let mut out = vec![Rational::from_integer(1.into())];
    for f in factors {
        out = out
            .iter()
            .flat_map(|a| f.iter().map(move |b| a * b))
            .collect();
    }
    QVector::new(out)
}

/// Gaussian elimination for a square system; `None` when singular.
pub fn solve_square(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).find(|&r| a[r][c] != Rational::from_integer(0.into()))?;
        a.swap(c, p);
        b.swap(c, p);
        for r in 0..n {
            if r != c && a[r][c] != Rational::from_integer(0.into()) {
                let k = &a[r][c] / &a[c][c];
                for j in c..n {
                    let t = &k * &a[c][j];
                    a[r][j] -= t;
                }
                let t = &k * &b[c];
                b[r] -= t;
            }
        }
    }
    Some((0..n).map(|i| &b[i] / &a[i][i]).collect())
}

/// Vertices of `{x : A x <= b, Σx = 1}` by brute force over active sets.
pub fn simplex_slice_vertices(rows: &[(QVector, Rational)], dim: usize) -> Vec<QVector> {
    let mut all: Vec<(QVector, Rational)> = (0..dim)
        .map(|i| (QVector::unit(dim, i).neg(), Rational::from_integer(0.into())))
        .collect();
    all.extend(rows.iter().cloned());
    let mut out: Vec<QVector> = Vec::new();
    let k = dim - 1;
    let mut pick: Vec<usize> = (0..k).collect();
    loop {
        let mut a: Vec<Vec<Rational>> = pick.iter().map(|&i| all[i].0.to_vec()).collect();
        let mut b: Vec<Rational> = pick.iter().map(|&i| all[i].1.clone()).collect();
        a.push(vec![Rational::from_integer(1.into()); dim]);
        b.push(Rational::from_integer(1.into()));
        if let Some(x) = solve_square(a, b) {
            let x = QVector::new(x);
            if all.iter().all(|(r, rhs)| &r.dot(&x) <= rhs) && !out.contains(&x) {
                out.push(x);
            }
        }
        // next k-subset
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if pick[i] < all.len() - k + i {
                pick[i] += 1;
                for j in i + 1..k {
                    pick[j] = pick[j - 1] + 1;
                }
                break;
            }
        }
    }
}
