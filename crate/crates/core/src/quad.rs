//! Globally adaptive Gauss–Kronrod (10/21) quadrature on finite intervals.
//!
//! The integrand returns a value together with the absolute error it already
//! carries, so nested integrals propagate inner errors outward: the reported
//! error is the Kronrod estimate plus the Kronrod-weighted inner errors.

use crate::numeric::Estimate;

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689,
    0.973_906_528_517_171_720_077_964_012_084,
    0.930_157_491_355_708_226_001_207_180_060,
    0.865_063_366_688_984_510_732_096_688_423,
    0.780_817_726_586_416_897_063_717_578_345,
    0.679_409_568_299_024_406_234_327_365_115,
    0.562_757_134_668_604_683_339_000_099_273,
    0.433_395_394_129_247_190_799_265_943_166,
    0.294_392_862_701_460_198_131_126_603_104,
    0.148_874_338_981_631_210_884_826_001_130,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062,
    0.032_558_162_307_964_727_478_818_972_459,
    0.054_755_896_574_351_996_031_381_300_245,
    0.075_039_674_810_919_952_767_043_140_916,
    0.093_125_454_583_697_605_535_065_465_083,
    0.109_387_158_802_297_641_899_210_590_326,
    0.123_491_976_262_065_851_077_600_525_983,
    0.134_709_217_311_473_325_928_054_001_772,
    0.142_775_938_577_060_080_797_094_273_139,
    0.147_739_104_901_338_491_374_841_515_972,
    0.149_445_554_002_916_905_664_936_468_390,
];

// Gauss weights for XGK[1], XGK[3], ..., XGK[9].
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893,
    0.149_451_349_150_580_593_145_776_339_658,
    0.219_086_362_515_982_043_995_534_934_228,
    0.269_266_719_309_996_355_091_226_921_569,
    0.295_524_224_714_752_870_173_892_994_651,
];

/// Tolerances for one adaptive 1-D integration.
#[derive(Debug, Clone, Copy)]
pub struct QuadSettings {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl From<&crate::numeric::NumericConfig> for QuadSettings {
    fn from(cfg: &crate::numeric::NumericConfig) -> Self {
        QuadSettings {
            rel_tol: cfg.rel_tol,
            abs_tol: cfg.abs_tol,
            max_subdivisions: cfg.max_subdivisions,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Piece {
    a: f64,
    b: f64,
    value: f64,
    rule_err: f64,
    inner_err: f64,
}

fn kronrod21<F: FnMut(f64) -> Estimate>(f: &mut F, a: f64, b: f64) -> Piece {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut resk = fc.value * WGK[10];
    let mut resg = 0.0;
    let mut resabs = fc.value.abs() * WGK[10];
    let mut inner = fc.error * WGK[10];
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1.value;
        fv2[j] = f2.value;
        let s = f1.value + f2.value;
        resk += WGK[j] * s;
        resabs += WGK[j] * (f1.value.abs() + f2.value.abs());
        inner += WGK[j] * (f1.error + f2.error);
        if j % 2 == 1 {
            resg += WG[j / 2] * s;
        }
    }
    let reskh = resk * 0.5;
    let mut resasc = WGK[10] * (fc.value - reskh).abs();
    for j in 0..10 {
        resasc += WGK[j] * ((fv1[j] - reskh).abs() + (fv2[j] - reskh).abs());
    }
    let value = resk * half;
    resabs *= half.abs();
    resasc *= half.abs();
    let mut err = ((resk - resg) * half).abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    Piece {
        a,
        b,
        value,
        rule_err: err,
        inner_err: inner * half.abs(),
    }
}

/// Integrate `f` over `[a, b]`, starting from the pieces delimited by
/// `breaks` (points outside `(a, b)` are ignored). Returns zero for `a >= b`.
pub fn integrate<F>(mut f: F, a: f64, b: f64, breaks: &[f64], settings: &QuadSettings) -> Estimate
where
    F: FnMut(f64) -> Estimate,
{
    if !(b > a) {
        return Estimate::ZERO;
    }
    let mut cuts: Vec<f64> = Vec::with_capacity(breaks.len() + 2);
    cuts.push(a);
    let mut inner: Vec<f64> = breaks.iter().copied().filter(|&x| x > a && x < b).collect();
    inner.sort_by(|x, y| x.partial_cmp(y).unwrap());
    inner.dedup();
    cuts.extend(inner);
    cuts.push(b);

    let mut pieces: Vec<Piece> = cuts
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| kronrod21(&mut f, w[0], w[1]))
        .collect();

    for _ in 0..settings.max_subdivisions {
        let total: f64 = pieces.iter().map(|p| p.value).sum();
        let rule_err: f64 = pieces.iter().map(|p| p.rule_err).sum();
        if rule_err <= settings.abs_tol.max(settings.rel_tol * total.abs()) {
            break;
        }
        let (worst, _) = pieces
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.rule_err.partial_cmp(&y.1.rule_err).unwrap())
            .unwrap();
        let p = pieces.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        if !(mid > p.a && mid < p.b) {
            pieces.push(p);
            break;
        }
        pieces.push(kronrod21(&mut f, p.a, mid));
        pieces.push(kronrod21(&mut f, mid, p.b));
    }

    let value = pieces.iter().map(|p| p.value).sum();
    let error = pieces.iter().map(|p| p.rule_err + p.inner_err).sum();
    Estimate { value, error }
}

/// Convenience wrapper for plain scalar integrands.
pub fn integrate_scalar<F>(mut f: F, a: f64, b: f64, breaks: &[f64], settings: &QuadSettings) -> Estimate
where
    F: FnMut(f64) -> f64,
{
    integrate(|x| Estimate::exact(f(x)), a, b, breaks, settings)
}
