//! The task environment: a restricted Boolean input space, the family of
//! non-constant symmetric Boolean tasks over it, and the samplers that draw
//! tasks and training sets.
//!
//! Inputs are bit vectors whose ones-count lies in `ones_min..=ones_max`
//! (by default length 10 with one to four ones, 385 patterns). A symmetric
//! task depends only on the ones-count, so it is stored as a truth table
//! over the admissible counts.

use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use rand::seq::index;
use rand::Rng;

use crate::error::{Error, Result};

/// Longest input vector the environment supports. Patterns are packed into a
/// `u32` and exhaustive enumeration has to stay cheap.
pub const MAX_INPUT_LENGTH: u32 = 24;

/// Widest ones-count range; task truth tables are packed into a `u32`.
pub const MAX_CATEGORIES: u32 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EnvironmentSpec {
    pub input_length: u32,
    pub ones_min: u32,
    pub ones_max: u32,
}

impl Default for EnvironmentSpec {
    fn default() -> Self {
        Self {
            input_length: 10,
            ones_min: 1,
            ones_max: 4,
        }
    }
}

impl EnvironmentSpec {
    pub fn new(input_length: u32, ones_min: u32, ones_max: u32) -> Result<Self> {
        let spec = Self {
            input_length,
            ones_min,
            ones_max,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.input_length == 0 || self.input_length > MAX_INPUT_LENGTH {
            return Err(Error::InvalidEnvironment(format!(
                "input_length {} not in 1..={MAX_INPUT_LENGTH}",
                self.input_length
            )));
        }
        if !(1 <= self.ones_min
            && self.ones_min <= self.ones_max
            && self.ones_max <= self.input_length)
        {
            return Err(Error::InvalidEnvironment(format!(
                "need 1 <= ones_min ({}) <= ones_max ({}) <= input_length ({})",
                self.ones_min, self.ones_max, self.input_length
            )));
        }
        if self.category_count() > MAX_CATEGORIES {
            return Err(Error::InvalidEnvironment(format!(
                "at most {MAX_CATEGORIES} ones-count categories are supported"
            )));
        }
        Ok(())
    }

    /// The admissible ones-counts.
    pub fn categories(&self) -> RangeInclusive<u32> {
        self.ones_min..=self.ones_max
    }

    pub fn category_count(&self) -> u32 {
        self.ones_max + 1 - self.ones_min
    }

    /// Number of non-constant symmetric tasks, `2^categories - 2`.
    pub fn task_count(&self) -> usize {
        (1usize << self.category_count()) - 2
    }

    /// Number of admissible input patterns.
    pub fn input_count(&self) -> usize {
        self.categories()
            .map(|c| binomial(self.input_length, c) as usize)
            .sum()
    }

    pub fn contains(&self, x: &InputPattern) -> bool {
        x.len() == self.input_length && self.categories().contains(&x.ones())
    }
}

/// `C(n, k)` for the small arguments used here.
pub fn binomial(n: u32, k: u32) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k) as u64;
    let n = n as u64;
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// A binary input vector.
///
/// Position 0 is the leftmost bit of the string form and the most
/// significant bit of [`InputPattern::mask`], so ascending masks give
/// lexicographic order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct InputPattern {
    len: u8,
    mask: u32,
}

impl InputPattern {
    pub fn from_mask(len: u32, mask: u32) -> Result<Self> {
        if len == 0 || len > MAX_INPUT_LENGTH {
            return Err(Error::InvalidPattern(format!("length {len} not supported")));
        }
        if len < 32 && mask >> len != 0 {
            return Err(Error::InvalidPattern(format!(
                "mask {mask:#x} wider than {len} bits"
            )));
        }
        Ok(Self {
            len: len as u8,
            mask,
        })
    }

    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        let len = bits.len() as u32;
        let mut mask = 0u32;
        for &b in bits {
            if b > 1 {
                return Err(Error::InvalidPattern(format!("bit value {b} is not 0/1")));
            }
            mask = (mask << 1) | b as u32;
        }
        Self::from_mask(len, mask)
    }

    /// Builds a pattern of length `len` with ones at the given positions.
    pub fn from_positions(len: u32, positions: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut mask = 0u32;
        for p in positions {
            if p as u32 >= len {
                return Err(Error::InvalidPattern(format!("position {p} out of range")));
            }
            mask |= 1 << (len - 1 - p as u32);
        }
        Self::from_mask(len, mask)
    }

    pub fn len(&self) -> u32 {
        self.len as u32
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn mask(&self) -> u32 {
        self.mask
    }

    pub fn ones(&self) -> u32 {
        self.mask.count_ones()
    }

    pub fn bit(&self, position: usize) -> bool {
        (self.mask >> (self.len as usize - 1 - position)) & 1 == 1
    }

    pub fn bits(&self) -> Vec<u8> {
        (0..self.len as usize).map(|i| self.bit(i) as u8).collect()
    }

    /// The pattern as network input activations.
    pub fn features(&self) -> Vec<f64> {
        (0..self.len as usize)
            .map(|i| if self.bit(i) { 1.0 } else { 0.0 })
            .collect()
    }

    /// Rearranges bits so that position `i` of the result holds bit `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.len as usize {
            return Err(Error::DimensionMismatch {
                expected: self.len as usize,
                actual: perm.len(),
            });
        }
        let bits: Vec<u8> = perm.iter().map(|&p| self.bit(p) as u8).collect();
        Self::from_bits(&bits)
    }
}

impl fmt::Display for InputPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len as usize {
            f.write_str(if self.bit(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for InputPattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .trim()
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(Error::InvalidPattern(format!(
                    "bad character {c:?} in {s:?}"
                ))),
            })
            .collect::<Result<Vec<u8>>>()?;
        Self::from_bits(&bits)
    }
}

/// A symmetric Boolean task: a truth table over the admissible ones-counts.
///
/// The table is packed so that the label for `ones_min` is the most
/// significant bit; the string form lists labels from `ones_min` upwards,
/// e.g. `"1010"` is parity on the default environment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymmetricTask {
    code: u32,
    ones_min: u32,
    ones_max: u32,
}

impl SymmetricTask {
    /// Builds a non-constant task from its packed table.
    pub fn from_code(spec: &EnvironmentSpec, code: u32) -> Result<Self> {
        spec.validate()?;
        let full = (1u32 << spec.category_count()) - 1;
        if code == 0 || code >= full {
            return Err(Error::InvalidTask(format!(
                "table {code} is constant or out of range for {} categories",
                spec.category_count()
            )));
        }
        Ok(Self {
            code,
            ones_min: spec.ones_min,
            ones_max: spec.ones_max,
        })
    }

    pub fn parse(spec: &EnvironmentSpec, table: &str) -> Result<Self> {
        let table = table.trim();
        if table.len() != spec.category_count() as usize {
            return Err(Error::InvalidTask(format!(
                "table {table:?} needs {} entries",
                spec.category_count()
            )));
        }
        let code = table.chars().try_fold(0u32, |acc, c| match c {
            '0' => Ok(acc << 1),
            '1' => Ok((acc << 1) | 1),
            _ => Err(Error::InvalidTask(format!(
                "bad character {c:?} in {table:?}"
            ))),
        })?;
        Self::from_code(spec, code)
    }

    pub fn code(&self) -> u32 {
        self.code
    }

    /// Label for a ones-count.
    pub fn label(&self, ones: u32) -> Result<u8> {
        if ones < self.ones_min || ones > self.ones_max {
            return Err(Error::OutsideDomain {
                ones,
                min: self.ones_min,
                max: self.ones_max,
            });
        }
        Ok(((self.code >> (self.ones_max - ones)) & 1) as u8)
    }

    pub fn eval(&self, x: &InputPattern) -> Result<u8> {
        self.label(x.ones())
    }
}

impl fmt::Display for SymmetricTask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for ones in self.ones_min..=self.ones_max {
            let bit = (self.code >> (self.ones_max - ones)) & 1;
            f.write_str(if bit == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// All admissible patterns in lexicographic order.
pub fn enumerate_inputs(spec: &EnvironmentSpec) -> Result<Vec<InputPattern>> {
    spec.validate()?;
    let len = spec.input_length;
    let patterns = (0u32..(1u32 << len))
        .filter(|mask| spec.categories().contains(&mask.count_ones()))
        .map(|mask| InputPattern {
            len: len as u8,
            mask,
        })
        .collect();
    Ok(patterns)
}

/// All non-constant symmetric tasks in ascending table order.
pub fn enumerate_tasks(spec: &EnvironmentSpec) -> Result<Vec<SymmetricTask>> {
    spec.validate()?;
    let full = (1u32 << spec.category_count()) - 1;
    (1..full)
        .map(|code| SymmetricTask::from_code(spec, code))
        .collect()
}

/// `n` tasks drawn uniformly with replacement.
pub fn sample_tasks<R: Rng + ?Sized>(
    spec: &EnvironmentSpec,
    n: usize,
    rng: &mut R,
) -> Result<Vec<SymmetricTask>> {
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one task".into()));
    }
    let tasks = enumerate_tasks(spec)?;
    Ok((0..n)
        .map(|_| tasks[rng.gen_range(0..tasks.len())])
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum MeasureMode {
    /// Ones-count uniform over the categories, then positions uniform.
    #[default]
    CategoryUniform,
    /// Uniform over every admissible pattern.
    FlatUniform,
}

impl MeasureMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            MeasureMode::CategoryUniform => "category-uniform",
            MeasureMode::FlatUniform => "flat-uniform",
        }
    }
}

impl fmt::Display for MeasureMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MeasureMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "category-uniform" => Ok(MeasureMode::CategoryUniform),
            "flat-uniform" => Ok(MeasureMode::FlatUniform),
            other => Err(Error::InvalidArgument(format!(
                "unknown measure mode {other:?}"
            ))),
        }
    }
}

/// A probability measure on the admissible input patterns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InputMeasure {
    pub mode: MeasureMode,
    pub spec: EnvironmentSpec,
}

impl InputMeasure {
    pub fn new(mode: MeasureMode, spec: EnvironmentSpec) -> Result<Self> {
        spec.validate()?;
        Ok(Self { mode, spec })
    }

    /// Total probability of the patterns with `ones` ones.
    pub fn category_mass(&self, ones: u32) -> f64 {
        if !self.spec.categories().contains(&ones) {
            return 0.0;
        }
        match self.mode {
            MeasureMode::CategoryUniform => 1.0 / self.spec.category_count() as f64,
            MeasureMode::FlatUniform => {
                binomial(self.spec.input_length, ones) as f64 / self.spec.input_count() as f64
            }
        }
    }

    pub fn weight(&self, x: &InputPattern) -> f64 {
        if !self.spec.contains(x) {
            return 0.0;
        }
        let ones = x.ones();
        self.category_mass(ones) / binomial(self.spec.input_length, ones) as f64
    }

    pub fn weights(&self, xs: &[InputPattern]) -> Vec<f64> {
        xs.iter().map(|x| self.weight(x)).collect()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> InputPattern {
        let len = self.spec.input_length;
        let ones = match self.mode {
            MeasureMode::CategoryUniform => rng.gen_range(self.spec.categories()),
            MeasureMode::FlatUniform => {
                // Pick a category in proportion to its size.
                let mut r = rng.gen_range(0..self.spec.input_count() as u64);
                let mut chosen = self.spec.ones_max;
                for c in self.spec.categories() {
                    let size = binomial(len, c);
                    if r < size {
                        chosen = c;
                        break;
                    }
                    r -= size;
                }
                chosen
            }
        };
        let positions = index::sample(rng, len as usize, ones as usize);
        InputPattern::from_positions(len, positions.into_iter())
            .expect("sampled positions are in range")
    }
}

/// A noise-free labelled sample of one task.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrainingSet {
    pub task: SymmetricTask,
    pub pairs: Vec<(InputPattern, u8)>,
}

impl TrainingSet {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Draws `m` inputs i.i.d. from `measure` and labels them with `task`.
pub fn build_training_set<R: Rng + ?Sized>(
    task: SymmetricTask,
    m: usize,
    measure: &InputMeasure,
    rng: &mut R,
) -> Result<TrainingSet> {
    if m == 0 {
        return Err(Error::InvalidArgument(
            "training set size must be at least 1".into(),
        ));
    }
    let pairs = (0..m)
        .map(|_| {
            let x = measure.sample(rng);
            task.eval(&x).map(|y| (x, y))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TrainingSet { task, pairs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn default_tasks() -> Vec<SymmetricTask> {
        enumerate_tasks(&EnvironmentSpec::default()).unwrap()
    }

    #[test]
    fn default_space_sizes() {
        let spec = EnvironmentSpec::default();
        assert_eq!(enumerate_inputs(&spec).unwrap().len(), 385);
        assert_eq!(spec.input_count(), 385);
        assert_eq!(default_tasks().len(), 14);
        assert_eq!(spec.task_count(), 14);
    }

    #[test]
    fn category_counts_match_brute_force() {
        // Oracle: scan every 10-bit vector as a plain array.
        let mut brute = [0usize; 4];
        for v in 0u32..1024 {
            let ones = (0..10).filter(|i| (v >> i) & 1 == 1).count();
            if (1..=4).contains(&ones) {
                brute[ones - 1] += 1;
            }
        }
        assert_eq!(brute, [10, 45, 120, 210]);

        let inputs = enumerate_inputs(&EnvironmentSpec::default()).unwrap();
        let mut counts = [0usize; 4];
        for x in &inputs {
            counts[x.ones() as usize - 1] += 1;
        }
        assert_eq!(counts, brute);
    }

    #[test]
    fn inputs_are_lexicographic_and_unique() {
        let inputs = enumerate_inputs(&EnvironmentSpec::default()).unwrap();
        let strings: Vec<String> = inputs.iter().map(|x| x.to_string()).collect();
        let mut sorted = strings.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(strings, sorted);
        assert_eq!(strings[0], "0000000001");
    }

    #[test]
    fn single_category_is_one_hot() {
        let spec = EnvironmentSpec::new(10, 1, 1).unwrap();
        let inputs = enumerate_inputs(&spec).unwrap();
        assert_eq!(inputs.len(), 10);
        assert!(inputs.iter().all(|x| x.ones() == 1));
    }

    #[test]
    fn invalid_specs_are_rejected() {
        assert!(EnvironmentSpec::new(10, 0, 4).is_err());
        assert!(EnvironmentSpec::new(10, 5, 4).is_err());
        assert!(EnvironmentSpec::new(3, 1, 4).is_err());
        assert!(EnvironmentSpec::new(0, 1, 1).is_err());
        assert!(EnvironmentSpec::new(40, 1, 4).is_err());
    }

    #[test]
    fn task_order_and_exclusions() {
        let tasks = default_tasks();
        let codes: Vec<u32> = tasks.iter().map(|t| t.code()).collect();
        assert_eq!(codes, (1..15).collect::<Vec<_>>());
        let names: Vec<String> = tasks.iter().map(|t| t.to_string()).collect();
        assert!(!names.contains(&"0000".to_string()));
        assert!(!names.contains(&"1111".to_string()));
        assert_eq!(names[0], "0001");
        assert_eq!(names[13], "1110");
        let spec = EnvironmentSpec::default();
        assert!(SymmetricTask::parse(&spec, "0000").is_err());
        assert!(SymmetricTask::parse(&spec, "1111").is_err());
        assert!(SymmetricTask::parse(&spec, "101").is_err());
    }

    #[test]
    fn table_lookups() {
        let spec = EnvironmentSpec::default();
        let parity = SymmetricTask::parse(&spec, "1010").unwrap();
        let three: InputPattern = "0010010100".parse().unwrap();
        assert_eq!(parity.eval(&three).unwrap(), 1);
        let at_least_two = SymmetricTask::parse(&spec, "0111").unwrap();
        let one_hot: InputPattern = "0000100000".parse().unwrap();
        assert_eq!(at_least_two.eval(&one_hot).unwrap(), 0);
        assert_eq!(parity.to_string(), "1010");
    }

    #[test]
    fn label_outside_domain_is_an_error() {
        let parity = SymmetricTask::parse(&EnvironmentSpec::default(), "1010").unwrap();
        let zero: InputPattern = "0000000000".parse().unwrap();
        let five: InputPattern = "1111100000".parse().unwrap();
        assert!(matches!(
            parity.eval(&zero),
            Err(Error::OutsideDomain { ones: 0, .. })
        ));
        assert!(parity.eval(&five).is_err());
    }

    #[test]
    fn symmetry_holds_within_every_category() {
        let inputs = enumerate_inputs(&EnvironmentSpec::default()).unwrap();
        for task in default_tasks() {
            for ones in 1..=4 {
                let labels: Vec<u8> = inputs
                    .iter()
                    .filter(|x| x.ones() == ones)
                    .map(|x| task.eval(x).unwrap())
                    .collect();
                assert!(labels.windows(2).all(|w| w[0] == w[1]));
            }
        }
    }

    #[test]
    fn permuting_bits_keeps_labels() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let measure =
            InputMeasure::new(MeasureMode::CategoryUniform, EnvironmentSpec::default()).unwrap();
        for task in default_tasks() {
            let x = measure.sample(&mut rng);
            let mut perm: Vec<usize> = (0..10).collect();
            rand::seq::SliceRandom::shuffle(perm.as_mut_slice(), &mut rng);
            let y = x.permuted(&perm).unwrap();
            assert_eq!(x.ones(), y.ones());
            assert_eq!(task.eval(&x).unwrap(), task.eval(&y).unwrap());
        }
    }

    #[test]
    fn task_sampling_is_seeded_and_uniform() {
        let spec = EnvironmentSpec::default();
        let a = sample_tasks(&spec, 50, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        let b = sample_tasks(&spec, 50, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        assert_eq!(a, b);
        assert!(sample_tasks(&spec, 0, &mut ChaCha8Rng::seed_from_u64(1)).is_err());

        let draws = 10_000;
        let sample = sample_tasks(&spec, draws, &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
        let p = 1.0 / 14.0;
        let se = (p * (1.0 - p) / draws as f64).sqrt();
        for task in default_tasks() {
            let freq = sample.iter().filter(|t| **t == task).count() as f64 / draws as f64;
            assert!((freq - p).abs() < 3.0 * se, "task {task}: {freq}");
        }
    }

    #[test]
    fn category_uniform_sampler_frequencies() {
        let measure =
            InputMeasure::new(MeasureMode::CategoryUniform, EnvironmentSpec::default()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let draws = 40_000;
        let mut counts = [0usize; 4];
        for _ in 0..draws {
            let x = measure.sample(&mut rng);
            assert!(measure.spec.contains(&x));
            counts[x.ones() as usize - 1] += 1;
        }
        let se = (0.25f64 * 0.75 / draws as f64).sqrt();
        for c in counts {
            assert!(
                (c as f64 / draws as f64 - 0.25).abs() < 3.0 * se,
                "{counts:?}"
            );
        }
    }

    #[test]
    fn flat_uniform_sampler_frequencies() {
        let spec = EnvironmentSpec::default();
        let measure = InputMeasure::new(MeasureMode::FlatUniform, spec).unwrap();
        let inputs = enumerate_inputs(&spec).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let draws = 77_000;
        let mut counts = std::collections::HashMap::new();
        for _ in 0..draws {
            *counts.entry(measure.sample(&mut rng)).or_insert(0usize) += 1;
        }
        assert_eq!(counts.len(), 385);
        // Expected 200 per pattern; chi-square with 384 dof has mean 384, sd ~27.7.
        let expected = draws as f64 / 385.0;
        let chi2: f64 = inputs
            .iter()
            .map(|x| {
                let o = counts[x] as f64;
                (o - expected).powi(2) / expected
            })
            .sum();
        assert!(chi2 < 384.0 + 4.0 * 27.7, "chi2 = {chi2}");
        for x in &inputs {
            let f = counts[x] as f64 / draws as f64;
            assert!((f - 1.0 / 385.0).abs() < 5.0 * (1.0f64 / 385.0 / draws as f64).sqrt());
        }
    }

    #[test]
    fn measures_are_normalized() {
        let spec = EnvironmentSpec::default();
        let inputs = enumerate_inputs(&spec).unwrap();
        for mode in [MeasureMode::CategoryUniform, MeasureMode::FlatUniform] {
            let m = InputMeasure::new(mode, spec).unwrap();
            let total: f64 = m.weights(&inputs).iter().sum();
            assert!((total - 1.0).abs() < 1e-12, "{mode}: {total}");
        }
    }

    #[test]
    fn training_sets_are_noise_free_and_seeded() {
        let spec = EnvironmentSpec::default();
        let measure = InputMeasure::new(MeasureMode::CategoryUniform, spec).unwrap();
        let task = SymmetricTask::parse(&spec, "0110").unwrap();
        let a = build_training_set(task, 40, &measure, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = build_training_set(task, 40, &measure, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a, b);
        assert!(a.pairs.iter().all(|(x, y)| task.eval(x).unwrap() == *y));
        let one = build_training_set(task, 1, &measure, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(one.len(), 1);
        assert!(build_training_set(task, 0, &measure, &mut ChaCha8Rng::seed_from_u64(9)).is_err());
    }

    #[test]
    fn string_forms_round_trip() {
        let x: InputPattern = "0100100001".parse().unwrap();
        assert_eq!(x.to_string(), "0100100001");
        assert_eq!(x.ones(), 3);
        assert_eq!(x.bits(), vec![0, 1, 0, 0, 1, 0, 0, 0, 0, 1]);
        assert!("01x".parse::<InputPattern>().is_err());
    }
}
