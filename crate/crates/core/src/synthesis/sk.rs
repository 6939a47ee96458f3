// Copyright 2026 The qwhile Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::gates::{from_m2, to_m2, M2};
use super::{Result, SynthesisError};
use crate::quantum::random::random_special_unitary;
use crate::quantum::{c64, ComplexMatrix, GateLibrary};

/// Base-net word length.
pub const DEFAULT_WORD_LENGTH: usize = 10;

/// Largest base-net covering radius the recursion is started from.
pub const MAX_NET_EPS0: f64 = 0.3;

/// Samples used to measure the covering radius of a net.
const EPS0_SAMPLES: usize = 1000;

/// Words over a gate alphabet up to a fixed length, one per distinct
/// element of SU(2) (up to sign).
#[derive(Debug, Clone)]
pub struct SkNet {
    alphabet: Vec<String>,
    letters: Vec<M2>,
    inverses: Vec<Vec<u8>>,
    max_len: usize,
    words: Vec<Vec<u8>>,
    points: Vec<[f64; 4]>,
    eps0: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SkResult {
    pub word: Vec<String>,
    /// Phase-invariant operator-norm distance of the word to the target.
    pub distance: f64,
    pub depth: usize,
}

fn to_su2(u: &M2) -> M2 {
    u / u.determinant().sqrt()
}

/// `[Re a, Im a, Re b, Im b]` for `u = [[a, −b̄], [b, ā]]`.
fn point(u: &M2) -> [f64; 4] {
    [u[(0, 0)].re, u[(0, 0)].im, u[(1, 0)].re, u[(1, 0)].im]
}

/// `2 sin(θ/4)` for the rotation angle `θ` of `p⁻¹q`.
fn distance(p: &[f64; 4], q: &[f64; 4]) -> f64 {
    let (mut minus, mut plus) = (0.0, 0.0);
    for (a, b) in p.iter().zip(q) {
        minus += (a - b) * (a - b);
        plus += (a + b) * (a + b);
    }
    minus.min(plus).sqrt()
}

fn su2_distance(a: &M2, b: &M2) -> f64 {
    distance(&point(a), &point(b))
}

fn key(p: &[f64; 4]) -> [i64; 4] {
    let s = p.iter().find(|x| x.abs() > 1e-6).map_or(1.0, |x| x.signum());
    p.map(|x| (x * s * 1e7).round() as i64)
}

impl SkNet {
    /// Breadth-first enumeration of words up to `max_len` letters over the
    /// named single-qubit gates of the standard library.
    pub fn build(alphabet: &[&str], max_len: usize) -> Result<Self> {
        let lib = GateLibrary::standard();
        if alphabet.is_empty() {
            return Err(SynthesisError::Alphabet("no single-qubit gates".into()));
        }
        let mut letters = Vec::new();
        for name in alphabet {
            match lib.get(name) {
                Some(m) if m.rows() == 2 => letters.push(to_su2(&to_m2(m))),
                _ => return Err(SynthesisError::Alphabet(format!("`{name}` is not a single-qubit gate"))),
            }
        }
        let mut words: Vec<Vec<u8>> = vec![Vec::new()];
        let mut mats = vec![M2::identity()];
        let mut seen: HashMap<[i64; 4], usize> = HashMap::new();
        seen.insert(key(&point(&M2::identity())), 0);
        let mut level = vec![0usize];
        for _ in 0..max_len {
            let mut next = Vec::new();
            for &w in &level {
                for (k, l) in letters.iter().enumerate() {
                    let m = l * mats[w];
                    let kk = key(&point(&m));
                    if seen.contains_key(&kk) {
                        continue;
                    }
                    seen.insert(kk, words.len());
                    let mut word = words[w].clone();
                    word.push(k as u8);
                    next.push(words.len());
                    words.push(word);
                    mats.push(m);
                }
            }
            level = next;
        }
        let points: Vec<[f64; 4]> = mats.iter().map(point).collect();
        let mut net = SkNet {
            alphabet: alphabet.iter().map(|s| s.to_string()).collect(),
            letters,
            inverses: Vec::new(),
            max_len,
            words,
            points,
            eps0: 0.0,
        };
        for l in net.letters.clone() {
            let (idx, d) = net.nearest(&l.adjoint());
            if d > 1e-9 {
                return Err(SynthesisError::Alphabet("alphabet is not closed under inverses within the net".into()));
            }
            net.inverses.push(net.words[idx].clone());
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        net.eps0 = (0..EPS0_SAMPLES)
            .map(|_| net.nearest(&to_m2(&random_special_unitary(2, &mut rng))).1)
            .fold(0.0, f64::max);
        Ok(net)
    }

    /// The default alphabet `{H, T, Tdg, S, Sdg, X}` at the default length.
    pub fn default_net() -> Result<Self> {
        Self::build(&["H", "T", "Tdg", "S", "Sdg", "X"], DEFAULT_WORD_LENGTH)
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Largest distance from a sampled SU(2) element to the net.
    pub fn eps0(&self) -> f64 {
        self.eps0
    }

    /// Stored words as gate names, first gate applied first.
    pub fn words(&self) -> impl Iterator<Item = Vec<&str>> + '_ {
        self.words.iter().map(|w| self.names(w))
    }

    fn names(&self, w: &[u8]) -> Vec<&str> {
        w.iter().map(|&k| self.alphabet[k as usize].as_str()).collect()
    }

    fn nearest(&self, u: &M2) -> (usize, f64) {
        let p = point(u);
        self.points
            .iter()
            .enumerate()
            .map(|(i, q)| (i, distance(&p, q)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("net holds the identity")
    }

    fn word_matrix(&self, w: &[u8]) -> M2 {
        w.iter().fold(M2::identity(), |acc, &k| self.letters[k as usize] * acc)
    }

    fn inverse_word(&self, w: &[u8]) -> Vec<u8> {
        w.iter().rev().flat_map(|&k| self.inverses[k as usize].iter().copied()).collect()
    }

    /// Word and its SU(2) product (up to sign) approximating `u` at
    /// recursion depth `n`; never worse than depth `n − 1`.
    fn approx(&self, u: &M2, n: usize) -> (Vec<u8>, M2) {
        let (idx, _) = self.nearest(u);
        if n == 0 {
            return (self.words[idx].clone(), self.word_matrix(&self.words[idx]));
        }
        let (prev, m_prev) = self.approx(u, n - 1);
        let delta = u * m_prev.adjoint();
        let Some((v, w)) = group_commutator(&delta) else {
            return (prev, m_prev);
        };
        let (wv, mv) = self.approx(&v, n - 1);
        let (ww, mw) = self.approx(&w, n - 1);
        let m = mv * mw * mv.adjoint() * mw.adjoint() * m_prev;
        if su2_distance(&m, u) >= su2_distance(&m_prev, u) {
            return (prev, m_prev);
        }
        let mut word = prev;
        word.extend(self.inverse_word(&ww));
        word.extend(self.inverse_word(&wv));
        word.extend(ww);
        word.extend(wv);
        (word, m)
    }

    /// Drops adjacent letter pairs that multiply to the identity.
    fn cancel(&self, w: Vec<u8>) -> Vec<u8> {
        let mut out: Vec<u8> = Vec::with_capacity(w.len());
        for k in w {
            match out.last() {
                Some(&p) if self.inverses[p as usize] == [k] => {
                    out.pop();
                }
                _ => out.push(k),
            }
        }
        out
    }

    /// Approximation at a fixed recursion depth.
    pub fn approximate(&self, u: &ComplexMatrix, depth: usize) -> SkResult {
        let target = to_su2(&to_m2(u));
        let (w, _) = self.approx(&target, depth);
        let w = self.cancel(w);
        let lib = GateLibrary::standard();
        let product = w.iter().fold(M2::identity(), |acc, &k| {
            to_m2(lib.get(&self.alphabet[k as usize]).expect("alphabet gate")) * acc
        });
        SkResult {
            distance: from_m2(&product).phase_invariant_distance(u),
            word: self.names(&w).into_iter().map(String::from).collect(),
            depth,
        }
    }
}

/// Rotation by `angle` about the unit vector `axis`.
fn rotation(axis: [f64; 3], angle: f64) -> M2 {
    let (s, c) = (angle / 2.0).sin_cos();
    let [x, y, z] = axis;
    M2::new(c64(c, -s * z), c64(-s * y, -s * x), c64(s * y, -s * x), c64(c, s * z))
}

/// Unit axis and angle in `[0, π]` of an SU(2) element (up to sign).
fn axis_angle(u: &M2) -> ([f64; 3], f64) {
    let u = if (u[(0, 0)] + u[(1, 1)]).re < 0.0 { -u } else { *u };
    let c = ((u[(0, 0)] + u[(1, 1)]).re / 2.0).clamp(-1.0, 1.0);
    let s = (1.0 - c * c).max(0.0).sqrt();
    if s < 1e-15 {
        return ([0.0, 0.0, 1.0], 0.0);
    }
    let x = -(u[(0, 1)] + u[(1, 0)]).im / (2.0 * s);
    let y = (u[(1, 0)] - u[(0, 1)]).re / (2.0 * s);
    let z = -(u[(0, 0)] - u[(1, 1)]).im / (2.0 * s);
    let n = (x * x + y * y + z * z).sqrt();
    ([x / n, y / n, z / n], 2.0 * s.atan2(c))
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

/// Balanced group commutator: `V W V† W† = Δ` with `V`, `W` rotations by
/// the same angle `φ`, `sin(θ/2) = 2 sin²(φ/2) √(1 − sin⁴(φ/2))`.
fn group_commutator(delta: &M2) -> Option<(M2, M2)> {
    let (n, theta) = axis_angle(delta);
    if theta < 1e-15 {
        return None;
    }
    let st = (theta / 2.0).sin();
    let s = ((1.0 - (1.0 - st * st).max(0.0).sqrt()) / 2.0).powf(0.25);
    let phi = 2.0 * s.asin();
    let v = rotation([1.0, 0.0, 0.0], phi);
    let w = rotation([0.0, 1.0, 0.0], phi);
    let comm = v * w * v.adjoint() * w.adjoint();
    let (m, _) = axis_angle(&comm);
    // S maps the commutator's axis onto Δ's
    let dot = (m[0] * n[0] + m[1] * n[1] + m[2] * n[2]).clamp(-1.0, 1.0);
    let c = cross(m, n);
    let cn = (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt();
    let rot = if cn > 1e-12 {
        rotation([c[0] / cn, c[1] / cn, c[2] / cn], dot.acos())
    } else if dot > 0.0 {
        M2::identity()
    } else {
        let p = if m[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
        let c = cross(m, p);
        let cn = (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt();
        rotation([c[0] / cn, c[1] / cn, c[2] / cn], std::f64::consts::PI)
    };
    Some((rot * v * rot.adjoint(), rot * w * rot.adjoint()))
}

/// Shallowest approximation of the single-qubit `u` within `epsilon`,
/// trying depths `0..=depth`; the best word found if none reaches it.
pub fn solovay_kitaev(u: &ComplexMatrix, epsilon: f64, net: &SkNet, depth: usize) -> Result<SkResult> {
    let mut best = net.approximate(u, 0);
    if best.distance <= epsilon {
        return Ok(best);
    }
    if net.eps0 > MAX_NET_EPS0 && depth > 0 {
        return Err(SynthesisError::NetTooCoarse { eps0: net.eps0 });
    }
    for k in 1..=depth {
        let r = net.approximate(u, k);
        if r.distance < best.distance {
            best = r;
        }
        if best.distance <= epsilon {
            break;
        }
    }
    Ok(best)
}
