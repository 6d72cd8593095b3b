//! Adaptive explicit Runge-Kutta integration with Verner's efficient 9(8)
//! embedded pair.
//!
//! The propagated solution is the 9th-order one (local extrapolation); the
//! 8th-order companion only supplies the error estimate. Error is measured
//! against the infinity norm of the whole state, so the tolerance is relative
//! to the solution magnitude rather than to individual components.

use crate::error::{Error, Result};

pub trait OdeSystem<const N: usize> {
    fn rhs(&self, t: f64, y: &[f64; N], dy: &mut [f64; N]);
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Cap on attempted (accepted + rejected) steps.
    pub max_steps: usize,
    pub initial_step: Option<f64>,
}

impl Default for StepControl {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 0.0,
            max_steps: 1_000_000,
            initial_step: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationStats {
    pub accepted: usize,
    pub rejected: usize,
}

impl IntegrationStats {
    pub fn attempted(&self) -> usize {
        self.accepted + self.rejected
    }
}

const STAGES: usize = 16;
const ERROR_EXPONENT: f64 = 1.0 / 9.0;
const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 5.0;

// Verner, "efficient" RKV98 IIa tableau.
const C: [f64; STAGES] = [
    0.0,
    0.3571e-1,
    9.906_028_091_267_415e-2,
    0.148_590_421_369_011_2,
    0.6134,
    0.232_735_947_360_562_7,
    0.553_864_052_639_437_3,
    0.6555,
    0.491625,
    0.6858e-1,
    0.253,
    0.662_064_179_541_204_6,
    0.8309,
    0.8998,
    1.0,
    1.0,
];

const A: [[f64; STAGES]; STAGES] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.3571e-1, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [-3.833_735_636_677_017e-2, 0.137_397_637_279_444_32, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.714_760_534_225_28e-2, 0.0, 0.111_442_816_026_758_42, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [2.674_764_429_871_505, 0.0, -9.982_382_134_885_293, 7.921_017_705_013_789, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [5.242_104_050_577_351e-2, 0.0, 0.0, 0.179_691_118_917_595_32, 6.237_879_371_938_568e-4, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.159_249_222_364_763_22, 0.0, 0.0, -0.429_842_987_724_108_7, 6.665_266_542_726_088e-2, 0.757_805_152_571_522, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [7.283_333_333_333_333e-2, 0.0, 0.0, 0.0, 0.0, 0.335_934_459_066_510_37, 0.246_732_207_600_156_3, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.729755859375e-1, 0.0, 0.0, 0.0, 0.0, 0.334_800_972_969_933_33, 0.118_415_823_905_066_65, -0.345673828125e-1, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [4.911_213_663_452_096_4e-2, 0.0, 0.0, 0.0, 0.0, 3.983_857_361_308_652e-2, 0.106_967_528_893_935_49, -2.174_259_165_458_647_7e-2, -0.105_595_647_486_956_49, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [-2.707_988_818_641_280_5e-2, 0.0, 0.0, 0.0, 0.0, 0.333e-1, -0.164_552_607_003_605_72, 3.428_266_306_497_39e-2, 0.158_526_406_443_922_1, 0.218_523_425_681_122_5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [5.584_657_769_108_862_5e-2, 0.0, 0.0, 0.0, 0.0, 9.166_533_166_672_539e-2, 0.239_239_965_552_362_7, 1.023_834_712_248_415e-2, -2.679_331_322_859_542_6e-3, 4.235_624_181_474_284_5e-2, 0.225_397_047_016_660_4, 0.0, 0.0, 0.0, 0.0, 0.0],
    [-0.480_251_051_272_519_6, 0.0, 0.0, 0.0, 0.0, -6.359_610_162_555_930_5, -0.276_231_389_804_084_1, -6.500_796_633_979_847, 0.573_476_587_704_095_7, 1.347_125_994_868_138_9, 5.936_840_409_706_221, 6.590_346_245_333_925, 0.0, 0.0, 0.0, 0.0],
    [0.330_753_306_767_140_1, 0.0, 0.0, 0.0, 0.0, 5.956_207_776_829_962, -0.486_831_640_048_152_77, 4.462_055_288_206_771, 0.741_025_823_144_207_2, -0.711_819_203_457_591_3, -5.454_619_594_516_665, -4.140_803_729_244_71, 0.203_831_972_319_038_66, 0.0, 0.0, 0.0],
    [-0.584_711_112_299_894_5, 0.0, 0.0, 0.0, 0.0, -12.412_684_171_162_67, 1.360_245_445_660_928, -22.426_105_311_118_683, -0.882_885_705_586_545_8, 1.770_155_128_538_230_4, 12.158_096_519_185_339, 22.230_375_204_077_607, -0.663_448_376_020_124_9, 0.450_962_378_725_813_74, 0.0, 0.0],
    [1.940_575_549_810_648_7, 0.0, 0.0, 0.0, 0.0, 21.977_984_081_145_564, 0.823_074_732_698_472_9, 68.164_416_836_263_54, -3.117_097_463_620_267, -4.568_841_021_822_44, -18.741_909_871_262_65, -66.577_118_396_378_32, 1.098_915_553_165_441_8, 0.0, 0.0, 0.0],
];

const B_HIGH: [f64; STAGES] = [1.500_669_014_979_724_7e-2, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, -1.055_180_992_746_381_3, 0.238_494_726_378_218_3, 0.128_815_177_428_299_15, 0.227_662_311_104_621_57, 1.229_532_587_437_517_4, 4.624_976_662_810_384e-2, 0.138_619_631_936_629_38, 3.080_010_168_319_435_5e-2, 0.0];

const B_LOW: [f64; STAGES] = [1.897_210_532_481_101_4e-2, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 3.408_110_314_549_493_8, 0.126_032_388_382_092_1, 0.118_837_506_345_114_97, 0.249_104_199_783_868_75, -3.269_966_219_928_978_3, 0.302_379_810_022_888_3, 0.0, 0.0, 4.652_989_552_070_924e-2];

fn inf_norm<const N: usize>(y: &[f64; N]) -> f64 {
    y.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

/// One trial step of size `h`: returns the 9th-order update and the
/// embedded error estimate.
fn trial_step<S: OdeSystem<N>, const N: usize>(
    system: &S,
    t: f64,
    y: &[f64; N],
    f0: &[f64; N],
    h: f64,
    k: &mut [[f64; N]; STAGES],
) -> ([f64; N], [f64; N]) {
    k[0] = *f0;
    for s in 1..STAGES {
        let mut ys = *y;
        for (j, a) in A[s].iter().enumerate().take(s) {
            if *a != 0.0 {
                for i in 0..N {
                    ys[i] += h * a * k[j][i];
                }
            }
        }
        let mut out = [0.0; N];
        system.rhs(t + C[s] * h, &ys, &mut out);
        k[s] = out;
    }
    let mut y_new = *y;
    let mut err = [0.0; N];
    for s in 0..STAGES {
        let (bh, bl) = (B_HIGH[s], B_LOW[s]);
        if bh == 0.0 && bl == 0.0 {
            continue;
        }
        for i in 0..N {
            y_new[i] += h * bh * k[s][i];
            err[i] += h * (bh - bl) * k[s][i];
        }
    }
    (y_new, err)
}

fn initial_step<S: OdeSystem<N>, const N: usize>(
    system: &S,
    t0: f64,
    y0: &[f64; N],
    f0: &[f64; N],
    span: f64,
    control: &StepControl,
) -> f64 {
    // Hairer-Wanner starting step heuristic.
    let scale = control.abs_tol + control.rel_tol * inf_norm(y0);
    let d0 = inf_norm(y0) / scale;
    let d1 = inf_norm(f0) / scale;
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let h0 = h0.min(span.abs());
    let mut y1 = *y0;
    for i in 0..N {
        y1[i] += h0 * span.signum() * f0[i];
    }
    let mut f1 = [0.0; N];
    system.rhs(t0 + h0 * span.signum(), &y1, &mut f1);
    let mut diff = [0.0; N];
    for i in 0..N {
        diff[i] = f1[i] - f0[i];
    }
    let d2 = inf_norm(&diff) / scale / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(1.0 / 9.0)
    };
    (100.0 * h0).min(h1).min(span.abs())
}

/// Integrate from `t0` to `t1`, calling `observer(t, y)` after every accepted
/// step (including the last one, at exactly `t1`).
pub fn integrate<S, O, const N: usize>(
    system: &S,
    t0: f64,
    t1: f64,
    y0: [f64; N],
    control: &StepControl,
    mut observer: O,
) -> Result<([f64; N], IntegrationStats)>
where
    S: OdeSystem<N>,
    O: FnMut(f64, &[f64; N]),
{
    if !(control.rel_tol > 0.0) || control.abs_tol < 0.0 {
        return Err(Error::InvalidConfig(format!(
            "tolerances must satisfy rel_tol > 0, abs_tol >= 0 (got {}, {})",
            control.rel_tol, control.abs_tol
        )));
    }
    let mut stats = IntegrationStats {
        accepted: 0,
        rejected: 0,
    };
    let span = t1 - t0;
    if span == 0.0 {
        return Ok((y0, stats));
    }
    let dir = span.signum();

    let mut t = t0;
    let mut y = y0;
    let mut f = [0.0; N];
    system.rhs(t, &y, &mut f);
    let mut h = control
        .initial_step
        .map(f64::abs)
        .unwrap_or_else(|| initial_step(system, t0, &y0, &f, span, control));
    let mut k = [[0.0; N]; STAGES];
    let mut last_rejected = false;

    loop {
        if stats.attempted() >= control.max_steps {
            return Err(Error::StepLimitExceeded(control.max_steps));
        }
        let remaining = (t1 - t).abs();
        let finishing = h >= remaining;
        let h_step = if finishing { remaining } else { h };
        if h_step <= 4.0 * f64::EPSILON * t.abs().max(remaining) && !finishing {
            return Err(Error::StepSizeUnderflow(h_step));
        }

        let (y_new, err) = trial_step(system, t, &y, &f, dir * h_step, &mut k);
        let scale = control.abs_tol + control.rel_tol * inf_norm(&y).max(inf_norm(&y_new));
        let err_norm = inf_norm(&err) / scale;

        if err_norm <= 1.0 {
            stats.accepted += 1;
            t = if finishing { t1 } else { t + dir * h_step };
            y = y_new;
            observer(t, &y);
            if finishing {
                return Ok((y, stats));
            }
            system.rhs(t, &y, &mut f);
            let mut factor = if err_norm == 0.0 {
                MAX_FACTOR
            } else {
                (SAFETY * err_norm.powf(-ERROR_EXPONENT)).clamp(MIN_FACTOR, MAX_FACTOR)
            };
            if last_rejected {
                factor = factor.min(1.0);
            }
            h = h_step * factor;
            last_rejected = false;
        } else {
            stats.rejected += 1;
            let factor = if err_norm.is_finite() {
                (SAFETY * err_norm.powf(-ERROR_EXPONENT)).clamp(MIN_FACTOR, 1.0)
            } else {
                MIN_FACTOR
            };
            h = h_step * factor;
            last_rejected = true;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Harmonic(f64);

    impl OdeSystem<2> for Harmonic {
        fn rhs(&self, _t: f64, y: &[f64; 2], dy: &mut [f64; 2]) {
            dy[0] = y[1];
            dy[1] = -self.0 * self.0 * y[0];
        }
    }

    struct Growth;

    impl OdeSystem<1> for Growth {
        fn rhs(&self, _t: f64, y: &[f64; 1], dy: &mut [f64; 1]) {
            dy[0] = y[0];
        }
    }

    #[test]
    fn tableau_is_consistent() {
        for s in 0..STAGES {
            let row: f64 = A[s].iter().sum();
            assert!((row - C[s]).abs() < 1e-13, "row {s}");
            assert!(A[s][s..].iter().all(|&a| a == 0.0), "explicit row {s}");
        }
        // Quadrature conditions: Σ b c^q = 1/(q+1) up to the order of each weight set.
        for q in 0..9 {
            let high: f64 = (0..STAGES).map(|s| B_HIGH[s] * C[s].powi(q)).sum();
            assert!((high - 1.0 / (q as f64 + 1.0)).abs() < 1e-14, "high q={q}");
        }
        for q in 0..8 {
            let low: f64 = (0..STAGES).map(|s| B_LOW[s] * C[s].powi(q)).sum();
            assert!((low - 1.0 / (q as f64 + 1.0)).abs() < 1e-14, "low q={q}");
        }
    }

    #[test]
    fn fixed_step_convergence_is_ninth_order() {
        let errs: Vec<f64> = [4usize, 8]
            .iter()
            .map(|&n| {
                let h = 2.0 / n as f64;
                let mut k = [[0.0; 1]; STAGES];
                let (mut t, mut y) = (0.0, [1.0]);
                for _ in 0..n {
                    let mut f = [0.0];
                    Growth.rhs(t, &y, &mut f);
                    y = trial_step(&Growth, t, &y, &f, h, &mut k).0;
                    t += h;
                }
                (y[0] - 2f64.exp()).abs()
            })
            .collect();
        let order = (errs[0] / errs[1]).log2();
        assert!(order > 8.5 && order < 10.5, "observed order {order} from {errs:?}");
    }

    #[test]
    fn adaptive_oscillator_meets_tolerance() {
        let omega = 3.0;
        let t1 = 40.0;
        let control = StepControl {
            rel_tol: 1e-12,
            ..StepControl::default()
        };
        let mut last_t = 0.0;
        let (y, stats) = integrate(&Harmonic(omega), 0.0, t1, [1.0, 0.0], &control, |t, _| {
            assert!(t > last_t);
            last_t = t;
        })
        .unwrap();
        assert_eq!(last_t, t1);
        assert!((y[0] - (omega * t1).cos()).abs() < 1e-10);
        assert!((y[1] + omega * (omega * t1).sin()).abs() < 3e-10);
        assert!(stats.accepted > 10);
    }

    #[test]
    fn integrates_backwards() {
        let (y, _) = integrate(&Growth, 1.0, 0.0, [1f64.exp()], &StepControl::default(), |_, _| {}).unwrap();
        assert!((y[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn step_limit_is_reported() {
        let control = StepControl {
            rel_tol: 1e-14,
            max_steps: 5,
            ..StepControl::default()
        };
        let r = integrate(&Harmonic(50.0), 0.0, 100.0, [1.0, 0.0], &control, |_, _| {});
        assert_eq!(r.unwrap_err(), Error::StepLimitExceeded(5));
    }
}
