//! Uniform payoff security probe for the all-pay fixture.
//!
//! The probe renders the deviation construction numerically: bump every bid
//! by δ/2 (capped at the top bid), where δ comes from a numeric modulus of
//! continuity of the value, outside-option and cost functions, and check
//! that against opponents' bids perturbed inside a case-dependent
//! neighborhood the deviator loses less than ε. Three cases: losing bidder,
//! unique winner, tied winner (with a separate branch when the tie sits at
//! the top bid).

use rand::Rng;
use serde::Serialize;

use crate::fixtures::AllPaySpec;
use crate::rng::substream;

#[derive(Debug, Clone, Serialize)]
pub struct SecurityViolation {
    pub case: usize,
    pub deficit: f64,
    pub own_bid: f64,
    pub opponent_bids: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SecurityReport {
    pub epsilon: f64,
    /// Modulus-of-continuity radius: pairs closer than delta move ψ₁, ψ₂
    /// and every φ_i by less than ε/3. Half the largest radius the sampled
    /// modulus admits, absorbing the sampling error of the estimate.
    pub delta: f64,
    pub samples: usize,
    /// Tuples that landed in cases 1..3.
    pub case_counts: [usize; 3],
    pub violation_count: usize,
    pub violations: Vec<SecurityViolation>,
    pub seed: u64,
    pub pass: bool,
}

/// Deterministic low-discrepancy point in [0,1]^d (Weyl sequence).
fn weyl_point(index: usize, dim: usize) -> Vec<f64> {
    const IRRATIONALS: [f64; 8] = [
        0.414_213_562_373_095_1, // sqrt(2) - 1
        0.732_050_807_568_877_3, // sqrt(3) - 1
        0.236_067_977_499_789_7, // sqrt(5) - 2
        0.645_751_311_064_590_7, // sqrt(7) - 2
        0.316_624_790_355_399_8, // sqrt(11) - 3
        0.605_551_275_463_989_1, // sqrt(13) - 3
        0.123_105_625_617_660_7, // sqrt(17) - 4
        0.358_898_943_540_673_6, // sqrt(19) - 4
    ];
    (0..dim)
        .map(|k| ((index + 1) as f64 * IRRATIONALS[k % 8]).fract())
        .collect()
}

/// Largest spread of ψ₁, ψ₂, φ over sampled pairs at distance ≤ delta in
/// the (first-coordinate types, bids) domain.
fn modulus(spec: &AllPaySpec, delta: f64, pairs: usize) -> f64 {
    let n = spec.n;
    let dim = 2 * n; // tfirst coords + bids
    let mut worst = 0.0f64;
    for s in 0..pairs {
        let base = weyl_point(s, dim);
        let dir = weyl_point(s + pairs, dim);
        let norm: f64 = dir.iter().map(|x| (x - 0.5) * (x - 0.5)).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let step = delta / norm;
        let mut tfirst_a = vec![0.0; n];
        let mut tfirst_b = vec![0.0; n];
        let mut bids_a = vec![0.0; n];
        let mut bids_b = vec![0.0; n];
        for k in 0..n {
            tfirst_a[k] = base[k];
            tfirst_b[k] = (base[k] + (dir[k] - 0.5) * step).clamp(0.0, 1.0);
            bids_a[k] = base[n + k] * spec.abar;
            bids_b[k] = (bids_a[k] + (dir[n + k] - 0.5) * step).clamp(0.0, spec.abar);
        }
        for state in 0..spec.num_states() {
            worst = worst.max(
                (spec.psi1(state, &tfirst_a, &bids_a) - spec.psi1(state, &tfirst_b, &bids_b))
                    .abs(),
            );
            worst = worst.max(
                (spec.psi2(state, &tfirst_a, &bids_a) - spec.psi2(state, &tfirst_b, &bids_b))
                    .abs(),
            );
            for i in 0..n {
                worst = worst.max(
                    (spec.phi(i, state, &tfirst_a, &bids_a)
                        - spec.phi(i, state, &tfirst_b, &bids_b))
                    .abs(),
                );
            }
        }
    }
    worst
}

/// Bisect for the largest delta whose estimated modulus stays below
/// `target`; the returned radius is half of that, so the true modulus at
/// the returned radius stays below `target` even where sampling missed
/// the worst pair.
fn find_delta(spec: &AllPaySpec, target: f64, pairs: usize) -> f64 {
    let diam = ((spec.n as f64) * (1.0 + spec.abar * spec.abar)).sqrt();
    let mut lo = 1e-6;
    let mut hi = diam;
    if modulus(spec, hi, pairs) <= target {
        return 0.5 * hi;
    }
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        if modulus(spec, mid, pairs) <= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * lo
}

pub fn payoff_security_probe(
    spec: &AllPaySpec,
    epsilon: f64,
    sample_count: usize,
    seed: u64,
) -> SecurityReport {
    let n = spec.n;
    let delta = find_delta(spec, epsilon / 3.0, 10_000);
    let mut rng = substream(seed, &[0x5ec, 1]);
    let mut case_counts = [0usize; 3];
    let mut violations = Vec::new();

    for s in 0..sample_count {
        let i = s % n;
        // Full 2-D types for every bidder (the posterior needs both coords).
        let types: Vec<Vec<f64>> = (0..n)
            .map(|_| vec![rng.random::<f64>(), rng.random::<f64>()])
            .collect();
        let mut bids: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * spec.abar).collect();
        // Force ties on a schedule so all three cases appear.
        let max_other = bids
            .iter()
            .enumerate()
            .filter(|&(l, _)| l != i)
            .map(|(_, &b)| b)
            .fold(f64::NEG_INFINITY, f64::max);
        if s % 3 == 2 {
            if s % 9 == 8 {
                // Tie at the very top bid.
                bids[i] = spec.abar;
                let j = (i + 1) % n;
                bids[j] = spec.abar;
            } else {
                bids[i] = max_other;
            }
        }
        let own = bids[i];
        let max_other = bids
            .iter()
            .enumerate()
            .filter(|&(l, _)| l != i)
            .map(|(_, &b)| b)
            .fold(f64::NEG_INFINITY, f64::max);
        let bumped = (own + delta / 2.0).min(spec.abar);

        // Case-dependent neighborhood radius for the opponents' bids.
        let (case, radius) = if own < max_other {
            (0usize, delta / 2.0)
        } else if own > max_other {
            (1usize, 0.5 * (delta / 2.0).min(own - max_other))
        } else if bumped > own {
            // Tie below the cap: the bump wins outright on a small enough
            // neighborhood.
            (2usize, 0.5 * (delta / 2.0).min(bumped - own))
        } else {
            // Tie at the cap: shrink until the tie-share moves by less than
            // the slack the value gap leaves within ε/3.
            let tfirst: Vec<f64> = types.iter().map(|t| t[0]).collect();
            let kappa = spec.kappa(&types);
            let winners: Vec<usize> = (0..n).filter(|&l| bids[l] == own).collect();
            let xi_sum: f64 = winners.iter().map(|&l| spec.xi(l, &bids)).sum();
            let share = spec.xi(i, &bids) / xi_sum;
            let value_gap: f64 = (0..spec.num_states())
                .map(|j| {
                    (spec.psi1(j, &tfirst, &bids) - spec.psi2(j, &tfirst, &bids)) * kappa[j]
                })
                .sum();
            let eps1 = (share / 2.0).min(epsilon / 3.0 / value_gap.max(1e-9));
            let mut radius = delta / 2.0;
            for _ in 0..40 {
                let mut worst_shift = 0.0f64;
                for probe in 0..16 {
                    let mut y = bids.clone();
                    for (l, yl) in y.iter_mut().enumerate() {
                        if l == i {
                            continue;
                        }
                        let u = weyl_point(probe * n + l, 1)[0] * 2.0 - 1.0;
                        if bids[l] < spec.abar {
                            *yl = (bids[l] + u * radius).clamp(0.0, spec.abar - 1e-12);
                        } else {
                            *yl = (bids[l] - u.abs() * radius).clamp(0.0, spec.abar);
                        }
                    }
                    let still: Vec<usize> = (0..n)
                        .filter(|&l| l == i || y[l] >= spec.abar)
                        .collect();
                    let xi_sum_y: f64 = still.iter().map(|&l| spec.xi(l, &y)).sum();
                    let share_y = spec.xi(i, &y) / xi_sum_y;
                    worst_shift = worst_shift.max((share_y - share).abs());
                }
                if worst_shift < eps1 {
                    break;
                }
                radius *= 0.5;
            }
            (2usize, radius)
        };
        case_counts[case] += 1;

        // Perturb opponents within the radius; keep bidders below the cap
        // strictly below it in the capped-tie branch.
        let mut perturbed = bids.clone();
        for (l, slot) in perturbed.iter_mut().enumerate() {
            if l == i {
                continue;
            }
            let u = rng.random::<f64>() * 2.0 - 1.0;
            if case == 2 && own >= spec.abar && bids[l] < spec.abar {
                *slot = (bids[l] + u * radius).clamp(0.0, spec.abar - 1e-12);
            } else {
                *slot = (bids[l] + u * radius).clamp(0.0, spec.abar);
            }
        }

        let mut after_bids = perturbed;
        after_bids[i] = bumped;
        let before = spec.payoff(i, &types, &bids);
        let after = spec.payoff(i, &types, &after_bids);
        if after - before <= -epsilon {
            violations.push(SecurityViolation {
                case: case + 1,
                deficit: after - before,
                own_bid: own,
                opponent_bids: after_bids
                    .iter()
                    .enumerate()
                    .filter(|&(l, _)| l != i)
                    .map(|(_, &b)| b)
                    .collect(),
            });
        }
    }

    let violation_count = violations.len();
    violations.truncate(16);
    SecurityReport {
        epsilon,
        delta,
        samples: sample_count,
        case_counts,
        violation_count,
        violations,
        seed,
        pass: violation_count == 0,
    }
}
