//! Seeded problem instances shared by the demos and the tests.

use anyhow::Result;
use groupcast_core::channels::{bsc, degraded_bc_instance, random_pmf, CombinationNetwork, TabularBC};
use groupcast_core::info::{assemble_joint, AdmissibleSpec, AuxLaw, JointDistribution};
use groupcast_core::{Family, Label, Order};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn label(s: &str) -> Label {
    Label::parse(s).expect("static label")
}

/// Capacities 1, 2, 3, 5, 7, 11, 13 on the labels 1, 2, 3, 12, 13, 23, 123.
pub fn combination3() -> Result<(CombinationNetwork, Family)> {
    let f = Family::full(3)?;
    let caps = [1, 2, 3, 5, 7, 11, 13];
    let net = CombinationNetwork::new(3, f.labels().iter().copied().zip(caps))?;
    Ok((net, f))
}

/// Random admissible input on `order` with a random channel attached.
pub fn random_instance(
    order: &Order,
    q_size: usize,
    aux_max: usize,
    x_size: usize,
    out_max: usize,
    rng: &mut impl Rng,
) -> Result<(AdmissibleSpec, JointDistribution)> {
    let f = order.family();
    let aux: Vec<usize> = (0..f.len()).map(|_| rng.gen_range(2..=aux_max.max(2))).collect();
    let mut spec = AdmissibleSpec::random(order.clone(), q_size, &aux, x_size, rng)?;
    let outs: Vec<usize> = (0..f.k()).map(|_| rng.gen_range(2..=out_max.max(2))).collect();
    spec.channel = Some(TabularBC::random(x_size, outs, rng));
    let dist = assemble_joint(&spec)?;
    Ok((spec, dist))
}

/// `F = {1, 13, 123}` with `1 < 13 < 123`.
pub fn chain_order() -> Result<Order> {
    let f = Family::parse(3, &["1", "13", "123"])?;
    Ok(Order::explicit(f, &[(label("1"), label("13")), (label("13"), label("123")), (label("1"), label("123"))])?)
}

/// Binary auxiliaries with `U_123 - U_13 - U_1` (each a noisy copy of the
/// one above), `X = U_1`, and binary symmetric channels with `Y_2` a degraded
/// version of `Y_1`.
pub fn chain_instance(seed: u64) -> Result<(AdmissibleSpec, JointDistribution)> {
    let mut r = rng(seed);
    let order = chain_order()?;
    let mut flip = |lo: f64, hi: f64| r.gen_range(lo..hi);
    let top = flip(0.2, 0.8);
    let (a, b) = (flip(0.05, 0.3), flip(0.05, 0.3));
    let (p1, p2, p3) = (flip(0.02, 0.15), flip(0.05, 0.2), flip(0.02, 0.3));
    // U_1 rows run over (u_13, u_123); only u_13 matters
    let mut c1 = Vec::new();
    for u13 in 0..2 {
        for _u123 in 0..2 {
            c1.extend(&bsc(b)[u13]);
        }
    }
    let c13: Vec<f64> = (0..2).flat_map(|u| bsc(a)[u].clone()).collect();
    let spec = AdmissibleSpec {
        order,
        q_pmf: vec![1.0],
        aux: AuxLaw::Factored { alphabets: vec![2, 2, 2], conditionals: vec![c1, c13, vec![top, 1.0 - top]] },
        x_alphabet: 2,
        input_map: (0..8).map(|cell| (cell >> 2) & 1).collect(),
        channel: Some(degraded_bc_instance(&bsc(p1), &bsc(p2), &[bsc(p3)])?),
    };
    spec.validate()?;
    let dist = assemble_joint(&spec)?;
    Ok((spec, dist))
}

/// `E = F = {1, 2}` with an arbitrary (generally dependent) joint law of
/// `(U_1, U_2)`, `X = (U_1, U_2)`, and receiver `j` seeing a noisy copy of
/// `U_j` (correct with probability at least `1 - noise`).
pub fn marton_instance(aux: usize, noise: f64, rng: &mut impl Rng) -> Result<(AdmissibleSpec, JointDistribution)> {
    let f = Family::parse(2, &["1", "2"])?;
    fn view(aux: usize, noise: f64, rng: &mut impl Rng) -> Vec<Vec<f64>> {
        (0..aux)
            .map(|u| {
                let eps = noise * rng.gen::<f64>();
                let mut row: Vec<f64> = random_pmf(aux, rng).iter().map(|p| p * eps).collect();
                row[u] += 1.0 - eps;
                row
            })
            .collect()
    }
    let (v1, v2) = (view(aux, noise, rng), view(aux, noise, rng));
    let mut w = Vec::with_capacity(aux.pow(4));
    for u1 in 0..aux {
        for u2 in 0..aux {
            for y1 in 0..aux {
                for y2 in 0..aux {
                    w.push(v1[u1][y1] * v2[u2][y2]);
                }
            }
        }
    }
    let spec = AdmissibleSpec {
        order: Order::discrete(f),
        q_pmf: vec![1.0],
        aux: AuxLaw::Joint { alphabets: vec![aux, aux], pmf: random_pmf(aux * aux, rng) },
        x_alphabet: aux * aux,
        input_map: (0..aux * aux).collect(),
        channel: Some(TabularBC::new(aux * aux, vec![aux, aux], w)?),
    };
    spec.validate()?;
    let dist = assemble_joint(&spec)?;
    Ok((spec, dist))
}
