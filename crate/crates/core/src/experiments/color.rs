//! Learning basic colour names from cone-cell sensitivities.
//!
//! Each cone type's sensitivity range is cut into twelve wavelength bins, one
//! per half standard deviation of a standard normal. A wavelength's cue for a
//! cone is the normal probability mass of the bin it falls into, or zero when
//! it lies outside the cone's range. The target is the colour label a viewer
//! would report, or nothing for in-between hues.

use std::fmt;
use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Uniform};
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::rule::io::write_trace_tsv;
use crate::rule::{train, LearningEvent, TracePlan, TrainingConfig, WeightMatrix, WeightTrace};

/// Edges of the twelve half-standard-deviation bins.
pub const Z_EDGES: [f64; 13] = [
    f64::NEG_INFINITY,
    -2.5,
    -2.0,
    -1.5,
    -1.0,
    -0.5,
    0.0,
    0.5,
    1.0,
    1.5,
    2.0,
    2.5,
    f64::INFINITY,
];

pub const N_BINS: usize = 12;

/// Wavelength range the event generator draws from, in nm.
pub const SPECTRUM: (f64, f64) = (350.0, 750.0);

fn std_normal_cdf(z: f64) -> f64 {
    if z == f64::INFINITY {
        1.0
    } else if z == f64::NEG_INFINITY {
        0.0
    } else {
        0.5 * erfc(-z / std::f64::consts::SQRT_2)
    }
}

/// One of the twelve canonical z-intervals `(lower, upper]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ZBin(usize);

impl ZBin {
    pub fn from_index(index: usize) -> Result<Self> {
        if index < N_BINS {
            Ok(ZBin(index))
        } else {
            Err(Error::IndexOutOfRange {
                what: "z bin",
                index,
                dim: N_BINS,
            })
        }
    }

    /// The canonical bin with exactly these edges.
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        (0..N_BINS)
            .find(|&b| Z_EDGES[b] == lower && Z_EDGES[b + 1] == upper)
            .map(ZBin)
            .ok_or_else(|| {
                Error::InvalidConfig(format!("({lower}, {upper}] is not a half-sd z bin"))
            })
    }

    pub fn index(self) -> usize {
        self.0
    }

    pub fn lower(self) -> f64 {
        Z_EDGES[self.0]
    }

    pub fn upper(self) -> f64 {
        Z_EDGES[self.0 + 1]
    }

    pub fn all() -> impl Iterator<Item = ZBin> {
        (0..N_BINS).map(ZBin)
    }
}

/// Standard normal mass of the bin, `Φ(upper) − Φ(lower)`.
pub fn z_bin_probability(bin: ZBin) -> f64 {
    // Evaluate on the lower half and reflect, so mirrored bins agree to the
    // last bit.
    if bin.lower() >= 0.0 {
        std_normal_cdf(-bin.lower()) - std_normal_cdf(-bin.upper())
    } else {
        std_normal_cdf(bin.upper()) - std_normal_cdf(bin.lower())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    Blue,
    Green,
    Red,
}

impl Color {
    pub const ALL: [Color; 3] = [Color::Blue, Color::Green, Color::Red];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Color::Blue => "blue",
            Color::Green => "green",
            Color::Red => "red",
        }
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Wavelength limits (nm) of the twelve sensitivity bins of each cone.
/// Bin `b` of a cone covers `(edges[b], edges[b + 1]]`; the first bin also
/// includes its lower edge.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConeSensitivityTable {
    pub edges: [[f64; N_BINS + 1]; 3],
}

impl Default for ConeSensitivityTable {
    fn default() -> Self {
        Self::standard()
    }
}

impl ConeSensitivityTable {
    pub fn standard() -> Self {
        Self {
            edges: [
                [
                    350.0, 364.5, 379.0, 393.5, 408.0, 422.5, 437.0, 451.5, 466.0, 480.5, 495.0,
                    509.5, 524.0,
                ],
                [
                    428.0, 445.5, 463.0, 480.5, 498.0, 515.5, 533.0, 550.5, 568.0, 585.5, 603.0,
                    620.5, 638.0,
                ],
                [
                    450.0, 469.0, 499.0, 507.0, 526.0, 545.0, 564.0, 583.0, 602.0, 621.0, 640.0,
                    659.0, 678.0,
                ],
            ],
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (c, edges) in self.edges.iter().enumerate() {
            if edges.iter().any(|e| !e.is_finite()) || edges.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidConfig(format!(
                    "{} cone limits must be finite and strictly ascending",
                    Color::ALL[c]
                )));
            }
        }
        Ok(())
    }

    /// Bin of `cone` containing `wavelength`, if any.
    pub fn bin_of(&self, cone: Color, wavelength: f64) -> Option<ZBin> {
        let edges = &self.edges[cone.index()];
        if wavelength == edges[0] {
            return Some(ZBin(0));
        }
        if !(wavelength > edges[0] && wavelength <= edges[N_BINS]) {
            return None;
        }
        // First edge ≥ λ closes the bin.
        let upper = edges.partition_point(|&e| e < wavelength);
        Some(ZBin(upper - 1))
    }
}

/// Cue triple (blue, green, red) for a wavelength.
pub fn cone_cues(wavelength: f64, table: &ConeSensitivityTable) -> [f64; 3] {
    Color::ALL.map(|cone| {
        table
            .bin_of(cone, wavelength)
            .map(z_bin_probability)
            .unwrap_or(0.0)
    })
}

/// Wavelength interval (nm) reported as one colour name.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ColorBand {
    pub color: Color,
    pub lo: f64,
    pub hi: f64,
    /// Whether `hi` itself belongs to the band.
    pub closed_hi: bool,
}

impl ColorBand {
    pub fn contains(&self, wavelength: f64) -> bool {
        wavelength >= self.lo && (wavelength < self.hi || (self.closed_hi && wavelength == self.hi))
    }
}

/// Which wavelengths are reported as which colour name. Wavelengths outside
/// every band get the all-zero target.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabelIntervals {
    pub bands: Vec<ColorBand>,
}

impl Default for LabelIntervals {
    /// Blue [450, 490), green [500, 580), red [620, 750].
    fn default() -> Self {
        Self {
            bands: vec![
                ColorBand {
                    color: Color::Blue,
                    lo: 450.0,
                    hi: 490.0,
                    closed_hi: false,
                },
                ColorBand {
                    color: Color::Green,
                    lo: 500.0,
                    hi: 580.0,
                    closed_hi: false,
                },
                ColorBand {
                    color: Color::Red,
                    lo: 620.0,
                    hi: 750.0,
                    closed_hi: true,
                },
            ],
        }
    }
}

impl LabelIntervals {
    pub fn validate(&self) -> Result<()> {
        for (n, a) in self.bands.iter().enumerate() {
            if !(a.lo.is_finite() && a.hi.is_finite() && a.lo < a.hi) {
                return Err(Error::InvalidConfig(format!(
                    "empty or invalid {} band",
                    a.color
                )));
            }
            for b in &self.bands[n + 1..] {
                let disjoint = a.hi < b.lo
                    || b.hi < a.lo
                    || (a.hi == b.lo && !a.closed_hi)
                    || (b.hi == a.lo && !b.closed_hi);
                if !disjoint {
                    return Err(Error::InvalidConfig(format!(
                        "{} and {} bands overlap",
                        a.color, b.color
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Indicator target (blue, green, red); at most one entry is 1.
pub fn color_label(wavelength: f64, intervals: &LabelIntervals) -> [f64; 3] {
    let mut t = [0.0; 3];
    if let Some(band) = intervals.bands.iter().find(|b| b.contains(wavelength)) {
        t[band.color.index()] = 1.0;
    }
    t
}

pub fn color_event(
    wavelength: f64,
    table: &ConeSensitivityTable,
    intervals: &LabelIntervals,
) -> LearningEvent {
    LearningEvent::dense(
        cone_cues(wavelength, table).to_vec(),
        color_label(wavelength, intervals).to_vec(),
    )
    .expect("cue and label values are finite")
}

#[derive(Clone, Debug)]
pub struct ColorEvents {
    pub wavelengths: Vec<f64>,
    pub events: Vec<LearningEvent>,
}

/// `n` events with wavelengths drawn uniformly from the visible spectrum
/// (350–750 nm), reproducible from `seed`.
pub fn gen_color_events(
    n: usize,
    seed: u64,
    table: &ConeSensitivityTable,
    intervals: &LabelIntervals,
) -> Result<ColorEvents> {
    if n == 0 {
        return Err(Error::InvalidConfig(
            "need at least one colour event".into(),
        ));
    }
    table.validate()?;
    intervals.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dist = Uniform::new_inclusive(SPECTRUM.0, SPECTRUM.1);
    let wavelengths: Vec<f64> = (0..n).map(|_| dist.sample(&mut rng)).collect();
    let events = wavelengths
        .iter()
        .map(|&l| color_event(l, table, intervals))
        .collect();
    Ok(ColorEvents {
        wavelengths,
        events,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ColorExperimentConfig {
    pub n: usize,
    pub learning_rate: f64,
    pub seed: u64,
    pub table: ConeSensitivityTable,
    pub intervals: LabelIntervals,
    pub trace_stride: Option<u64>,
}

impl Default for ColorExperimentConfig {
    fn default() -> Self {
        Self {
            n: 100_000,
            learning_rate: 0.1,
            seed: 1,
            table: ConeSensitivityTable::standard(),
            intervals: LabelIntervals::default(),
            trace_stride: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ColorExperiment {
    pub weights: WeightMatrix,
    pub trace: WeightTrace,
}

/// Trains on generated colour events and traces all nine cone → name
/// weights.
pub fn run_color_experiment(config: &ColorExperimentConfig) -> Result<ColorExperiment> {
    let data = gen_color_events(config.n, config.seed, &config.table, &config.intervals)?;
    let plan = TracePlan {
        stride: config.trace_stride,
        ..TracePlan::all(3, 3)
    };
    let trained = train(
        &data.events,
        &TrainingConfig::new(config.learning_rate).with_trace(plan),
    )?;
    Ok(ColorExperiment {
        weights: trained.weights,
        trace: trained.trace.expect("trace requested"),
    })
}

impl ColorExperiment {
    /// Weight from a cone cue to a colour name.
    pub fn weight(&self, cone: Color, name: Color) -> f64 {
        self.weights.get(cone.index(), name.index())
    }

    /// Long-format trajectories: `event_index, cue, outcome, weight`.
    pub fn write_trajectory_tsv<W: Write>(&self, out: W) -> Result<()> {
        let names: Vec<String> = Color::ALL.iter().map(|c| c.to_string()).collect();
        write_trace_tsv(&self.trace, &names, &names, out)
    }

    pub fn sign_patterns(&self) -> SignPatterns {
        let w = |cone, name| self.weight(cone, name);
        use Color::*;
        let red =
            w(Red, Red) > 0.0 && w(Green, Red) < 0.0 && w(Blue, Red).abs() < 0.1 * w(Red, Red);
        let (b, g) = (w(Blue, Blue), w(Green, Blue));
        let blue = w(Red, Blue) < 0.0 && b > 0.0 && g > 0.0 && b.max(g) <= 2.0 * b.min(g);
        let green = w(Green, Green) > w(Red, Green) && w(Red, Green) > 0.0 && w(Blue, Green) < 0.0;
        SignPatterns { red, blue, green }
    }
}

/// Whether the final weights show the expected profile for each name.
///
/// - red: red cone positive, green cone negative, blue cone near zero
///   (below a tenth of the red-cone weight in magnitude);
/// - blue: red cone negative, blue and green cones positive and within a
///   factor of two of each other;
/// - green: green cone above red cone above zero, blue cone negative.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignPatterns {
    pub red: bool,
    pub blue: bool,
    pub green: bool,
}

impl SignPatterns {
    pub fn all(self) -> bool {
        self.red && self.blue && self.green
    }
}
