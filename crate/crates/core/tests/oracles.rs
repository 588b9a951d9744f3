//! Library results against brute-force evaluations written from the definitions.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hyshift::certified::Status;
use hyshift::criteria::{blockcert_to_growthcert, pump, tail_inf, theta, Criterion, Route};
use hyshift::dynamics::poly_power;
use hyshift::spaces::{parse_space_spec, SpaceModel};
use hyshift::weights::WeightSequence;

/// Raw eventually periodic weights `w_1, w_2, ...` with their library counterpart.
struct Family {
    prefix: Vec<f64>,
    period: Vec<f64>,
    w: WeightSequence,
}

impl Family {
    fn weight(&self, k: i64) -> f64 {
        let k = k as usize;
        if k <= self.prefix.len() {
            self.prefix[k - 1]
        } else {
            self.period[(k - 1 - self.prefix.len()) % self.period.len()]
        }
    }

    /// `ln prod_{v=1..n} w_{k+v}` by direct product of magnitudes, in chunks to stay in range.
    fn window(&self, n: usize, k: i64) -> f64 {
        let mut total = 0.0;
        let mut prod = 1.0f64;
        for v in 1..=n as i64 {
            prod *= self.weight(k + v).abs();
            if v % 16 == 0 {
                total += prod.ln();
                prod = 1.0;
            }
        }
        total + prod.ln()
    }

    fn drift(&self) -> f64 {
        self.period.iter().map(|x| x.abs().ln()).sum()
    }
}

fn random_family(rng: &mut ChaCha8Rng, max_prefix: usize, max_period: usize, periodic_only: bool) -> Family {
    fn draw(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
        (0..len)
            .map(|_| {
                let m = rng.random_range(-2.0f64..=2.0).exp();
                if rng.random_bool(0.2) {
                    -m
                } else {
                    m
                }
            })
            .collect()
    }
    let pl = if periodic_only { 0 } else { rng.random_range(0..=max_prefix) };
    let ql = rng.random_range(1..=max_period);
    let prefix = draw(rng, pl);
    let period = draw(rng, ql);
    let w = if prefix.is_empty() {
        WeightSequence::periodic(period.clone())
    } else {
        WeightSequence::eventually_periodic(prefix.clone(), period.clone())
    }
    .unwrap();
    Family { prefix, period, w }
}

fn lp() -> SpaceModel {
    parse_space_spec("lp:2").unwrap()
}

#[test]
fn window_log_matches_direct_products() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let f = random_family(&mut rng, 8, 8, false);
        for _ in 0..50 {
            let n = rng.random_range(1..=200usize);
            let k = rng.random_range(0..=300i64);
            let lib = f.w.window_log(n, k).unwrap();
            assert!((lib - f.window(n, k)).abs() < 1e-9, "{} n = {n} k = {k}", f.w.render());
        }
    }
}

#[test]
fn exact_tail_infimum_matches_brute_force_on_lp() {
    let s = lp();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..200 {
        let f = random_family(&mut rng, 8, 8, false);
        let c = Criterion::new(&f.w, &s, 1, 1).unwrap();
        let span = (f.prefix.len() + 2 * f.period.len()) as i64;
        for n in 1..=24usize {
            let big_n = rng.random_range(1..=12i64);
            let cv = tail_inf(&c, n, big_n, 64).unwrap();
            assert_eq!(cv.status, Status::Exact);
            let brute = (big_n..=big_n + span).map(|k| f.window(n, k)).fold(f64::INFINITY, f64::min);
            assert!((cv.inf_log - brute).abs() < 1e-9, "{} n = {n} N = {big_n}: {} vs {brute}", f.w.render(), cv.inf_log);
        }
    }
}

#[test]
fn exact_tail_infimum_matches_brute_force_on_entire() {
    // a_{j,k} = j^k from k = 0: q(n, k) = W(n, k) + k ln J - (n + k) ln m.
    let s = parse_space_spec("entire").unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut finite = 0;
    for _ in 0..200 {
        let f = random_family(&mut rng, 6, 6, false);
        let (big_j, m) = (rng.random_range(1..=3usize), rng.random_range(1..=3usize));
        let c = Criterion::new(&f.w, &s, big_j, m).unwrap();
        // W(n, .) is periodic in k, so only the rows tilt q(n, .).
        let k_slope = (big_j as f64).ln() - (m as f64).ln();
        let q = |n: usize, k: i64| f.window(n, k) + k as f64 * (big_j as f64).ln() - (n as i64 + k) as f64 * (m as f64).ln();
        for n in 1..=12usize {
            let cv = tail_inf(&c, n, 0, 64).unwrap();
            assert_eq!(cv.status, Status::Exact, "{} J = {big_j} m = {m} n = {n}", f.w.render());
            if k_slope < 0.0 {
                assert_eq!(cv.inf_log, f64::NEG_INFINITY);
                continue;
            }
            finite += 1;
            let span = (f.prefix.len() + 4 * f.period.len()) as i64;
            let brute = (0..=span).map(|k| q(n, k)).fold(f64::INFINITY, f64::min);
            assert!((cv.inf_log - brute).abs() < 1e-9, "{} J = {big_j} m = {m} n = {n}", f.w.render());
        }
    }
    assert!(finite > 100);
}

#[test]
fn theta_matches_brute_force_sup_inf() {
    let s = lp();
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..200 {
        let f = random_family(&mut rng, 6, 6, false);
        let c = Criterion::new(&f.w, &s, 1, 1).unwrap();
        let t = theta(&c, 8, 64).unwrap();
        assert_eq!(t.route, Route::Periodic);
        let d = f.drift();
        if d.abs() <= 1e-9 {
            continue;
        }
        if d > 0.0 {
            assert_eq!(t.value.log_value, f64::INFINITY);
            assert!(t.block.is_some());
            continue;
        }
        let span = (f.prefix.len() + 2 * f.period.len()) as i64;
        let n_top = 4 * (f.prefix.len() + f.period.len()) + 8;
        let brute = (1..=n_top)
            .map(|n| (1..=1 + span).map(|k| f.window(n, k)).fold(f64::INFINITY, f64::min))
            .fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(t.value.status, Status::Exact);
        assert!((t.value.log_value - brute).abs() < 1e-9, "{}: {} vs {brute}", f.w.render(), t.value.log_value);
    }
}

#[test]
fn growth_constant_k_matches_brute_force() {
    let s = lp();
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let mut seen = 0;
    while seen < 50 {
        let f = random_family(&mut rng, 0, 8, true);
        let c = Criterion::new(&f.w, &s, 1, 1).unwrap();
        let Some(block) = theta(&c, 8, 64).unwrap().block else { continue };
        seen += 1;
        let g = blockcert_to_growthcert(&block, &f.w, &s, 256).unwrap();
        let p = f.period.len() as i64;
        let brute = (1..block.m)
            .flat_map(|r| (block.big_n..block.big_n + p).map(move |k| (r, k)))
            .map(|(r, k)| f.window(r, k))
            .fold(0.0f64, f64::max);
        assert!((g.log_k - brute).abs() < 1e-9, "{}: {} vs {brute}", f.w.render(), g.log_k);
        // Every stored C_n is a lower bound for the n-windows past E_n.
        for (i, &lc) in g.log_c_n.iter().enumerate() {
            let n = i + 1;
            let e = g.e_n[i];
            let min = (e..e + p).map(|k| f.window(n, k)).fold(f64::INFINITY, f64::min);
            assert!(min >= lc - 1e-9, "{} n = {n}", f.w.render());
        }
    }
}

#[test]
fn pump_constants_follow_their_definitions() {
    let s = lp();
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    let ln10 = 10f64.ln();
    let mut seen = 0;
    while seen < 40 {
        let f = random_family(&mut rng, 0, 6, true);
        let c = Criterion::new(&f.w, &s, 1, 1).unwrap();
        let Some(b) = theta(&c, 8, 64).unwrap().block else { continue };
        let Some(p) = pump(&b, &b, &f.w, &s, 1024).unwrap() else { continue };
        seen += 1;
        let reach = b.big_n.max(1) as usize;
        let l1 = (1..).find(|&l| l * b.m >= reach && l as f64 * b.log_c > ln10).unwrap();
        assert_eq!(p.l1, l1);
        let first = l1 * b.m;
        let lambda0 = (1..first as i64).map(|k| f.window(first, k)).fold(f64::INFINITY, f64::min);
        assert!(p.lambda0 == lambda0 || (p.lambda0 - lambda0).abs() < 1e-9);
        let head = lambda0.min(l1 as f64 * b.log_c);
        let l2 = ((ln10 - head) / b.log_c).floor().max(0.0) as usize + 1;
        assert_eq!(p.l2, l2);
        assert_eq!(p.n_total, (l1 + l2) * b.m + b.m);
        let span = f.period.len() as i64 + 1;
        let brute = (1..=span).map(|k| f.window(p.n_total, k)).fold(f64::INFINITY, f64::min);
        assert!((p.checked_inf - brute).abs() < 1e-9);
        assert!(brute >= p.lower_bound - 1e-9 && brute > ln10);
    }
}

#[test]
fn poly_power_matches_repeated_convolution() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..200 {
        let d = rng.random_range(1..=4usize);
        let p: Vec<f64> = (0..=d).map(|_| rng.random_range(-3i32..=3) as f64).collect();
        if p[d] == 0.0 {
            continue;
        }
        let n = rng.random_range(1..=6usize);
        let mut cur = p.clone();
        let mut k_n = cur.iter().fold(0.0f64, |a, c| a.max(c.abs()));
        for _ in 1..n {
            let mut next = vec![0.0; cur.len() + d];
            for (i, a) in cur.iter().enumerate() {
                for (j, b) in p.iter().enumerate() {
                    next[i + j] += a * b;
                }
            }
            cur = next;
            k_n = cur.iter().fold(k_n, |a, c| a.max(c.abs()));
        }
        let lib = poly_power(&p, n).unwrap();
        assert_eq!(lib.coeffs, cur, "{p:?}^{n}");
        assert_eq!(lib.k_n, k_n);
    }
}
