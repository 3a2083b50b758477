//! Augmentation instances, policies, their execution strategies, and the
//! policy JSON format.

use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::Rng;
use serde_json::{json, Map, Value};
use thiserror::Error;

use super::kernels;
use super::kind::AugKind;
use super::params::scale_params;
use crate::image::Image;

pub const MAX_STRENGTH: f64 = 2.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolicyError {
    #[error("strength {0} outside [0, 2]")]
    StrengthRange(f64),
    #[error("probability {0} outside [0, 1]")]
    ProbabilityRange(f64),
    #[error("a policy needs at least one element")]
    Empty,
    #[error("the twoof strategy needs at least 2 elements, got {0}")]
    Arity(usize),
    #[error("element {index} does not match the {strategy} strategy")]
    ElementShape { index: usize, strategy: Strategy },
}

/// One gene: an augmentation kind with its strength and probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AugInstance {
    kind: AugKind,
    strength: f64,
    probability: f64,
}

impl AugInstance {
    pub fn new(kind: AugKind, strength: f64, probability: f64) -> Result<Self, PolicyError> {
        if !(0.0..=MAX_STRENGTH).contains(&strength) {
            return Err(PolicyError::StrengthRange(strength));
        }
        if !(0.0..=1.0).contains(&probability) {
            return Err(PolicyError::ProbabilityRange(probability));
        }
        Ok(Self { kind, strength, probability })
    }

    pub fn kind(&self) -> AugKind {
        self.kind
    }

    pub fn strength(&self) -> f64 {
        self.strength
    }

    pub fn probability(&self) -> f64 {
        self.probability
    }

    /// A uniformly random instance: kind over all kinds, strength in [0, 2),
    /// probability in [0, 1).
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let kind = AugKind::ALL[rng.random_range(0..AugKind::ALL.len())];
        let strength = rng.random_range(0.0..MAX_STRENGTH);
        let probability = rng.random::<f64>();
        Self { kind, strength, probability }
    }
}

/// Applies `aug` with probability `aug.probability()`. Exactly one gating draw
/// is consumed before any kernel randomness.
pub fn apply_one<R: Rng + ?Sized>(aug: &AugInstance, img: &Image, rng: &mut R) -> Image {
    if rng.random::<f64>() >= aug.probability {
        return img.clone();
    }
    apply_kernel(aug.kind, aug.strength, img, rng)
}

/// Unconditionally runs the kernel for `kind` at `strength`. Strength 0 scales
/// every parameter to nothing and leaves the image as is.
pub fn apply_kernel<R: Rng + ?Sized>(kind: AugKind, strength: f64, img: &Image, rng: &mut R) -> Image {
    match kind {
        AugKind::Invert => kernels::invert(img),
        AugKind::Equalize => kernels::equalize(img),
        AugKind::ChannelShuffle => kernels::channel_shuffle(img, rng),
        _ => match scale_params(kind, strength) {
            Ok(params) => kernels::run(&params, img, rng),
            Err(_) => img.clone(),
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    /// Every element in order, each gated by its probability.
    Sequential,
    /// One uniformly chosen element.
    OneOfSingle,
    /// One uniformly chosen pair, both members in order.
    OneOfDouble,
    /// Two distinct uniformly chosen elements, in index order.
    TwoOf,
}

impl Strategy {
    pub const ALL: [Strategy; 4] = [Strategy::Sequential, Strategy::OneOfSingle, Strategy::OneOfDouble, Strategy::TwoOf];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Sequential => "sequential",
            Strategy::OneOfSingle => "oneof_single",
            Strategy::OneOfDouble => "oneof_double",
            Strategy::TwoOf => "twoof",
        }
    }

    /// Smallest valid element count.
    pub fn min_len(self) -> usize {
        match self {
            Strategy::TwoOf => 2,
            _ => 1,
        }
    }

    pub fn uses_pairs(self) -> bool {
        self == Strategy::OneOfDouble
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown strategy `{0}`")]
pub struct UnknownStrategy(pub String);

impl FromStr for Strategy {
    type Err = UnknownStrategy;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Strategy::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| UnknownStrategy(s.to_string()))
    }
}

/// One policy element: a single augmentation, or an ordered pair for
/// the OneOfDouble strategy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Step {
    Single(AugInstance),
    Pair(AugInstance, AugInstance),
}

impl Step {
    pub fn random<R: Rng + ?Sized>(strategy: Strategy, rng: &mut R) -> Self {
        if strategy.uses_pairs() {
            let a = AugInstance::random(rng);
            Step::Pair(a, AugInstance::random(rng))
        } else {
            Step::Single(AugInstance::random(rng))
        }
    }

    pub fn apply<R: Rng + ?Sized>(&self, img: &Image, rng: &mut R) -> Image {
        match self {
            Step::Single(a) => apply_one(a, img, rng),
            Step::Pair(a, b) => {
                let mid = apply_one(a, img, rng);
                apply_one(b, &mid, rng)
            }
        }
    }

    pub fn instances(&self) -> impl Iterator<Item = &AugInstance> {
        let (a, b) = match self {
            Step::Single(a) => (a, None),
            Step::Pair(a, b) => (a, Some(b)),
        };
        std::iter::once(a).chain(b)
    }
}

/// An augmentation policy: a strategy plus its ordered elements.
#[derive(Debug, Clone, PartialEq)]
pub struct Policy {
    strategy: Strategy,
    steps: Vec<Step>,
}

impl Policy {
    pub fn new(strategy: Strategy, steps: Vec<Step>) -> Result<Self, PolicyError> {
        if steps.is_empty() {
            return Err(PolicyError::Empty);
        }
        if steps.len() < strategy.min_len() {
            return Err(PolicyError::Arity(steps.len()));
        }
        for (index, step) in steps.iter().enumerate() {
            if matches!(step, Step::Pair(..)) != strategy.uses_pairs() {
                return Err(PolicyError::ElementShape { index, strategy });
            }
        }
        Ok(Self { strategy, steps })
    }

    /// A sequential policy of the given instances.
    pub fn sequential(instances: impl IntoIterator<Item = AugInstance>) -> Result<Self, PolicyError> {
        Self::new(Strategy::Sequential, instances.into_iter().map(Step::Single).collect())
    }

    pub fn strategy(&self) -> Strategy {
        self.strategy
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn into_steps(self) -> Vec<Step> {
        self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// The same policy with every probability set to 0.
    pub fn disabled(&self) -> Self {
        let off = |a: &AugInstance| AugInstance { probability: 0.0, ..*a };
        let steps = self
            .steps
            .iter()
            .map(|s| match s {
                Step::Single(a) => Step::Single(off(a)),
                Step::Pair(a, b) => Step::Pair(off(a), off(b)),
            })
            .collect();
        Self { strategy: self.strategy, steps }
    }

    pub fn apply<R: Rng + ?Sized>(&self, img: &Image, rng: &mut R) -> Image {
        apply_policy(self, img, rng)
    }

    pub fn to_json(&self) -> Value {
        let inst = |a: &AugInstance| {
            json!({"kind": a.kind.name(), "strength": a.strength, "probability": a.probability})
        };
        let elements: Vec<Value> = self
            .steps
            .iter()
            .map(|s| match s {
                Step::Single(a) => inst(a),
                Step::Pair(a, b) => Value::Array(vec![inst(a), inst(b)]),
            })
            .collect();
        json!({"strategy": self.strategy.name(), "elements": elements})
    }

    pub fn from_json(value: &Value) -> Result<Self, ParseError> {
        parse_policy_value(value)
    }
}

/// Runs `policy` on `img` according to its strategy.
pub fn apply_policy<R: Rng + ?Sized>(policy: &Policy, img: &Image, rng: &mut R) -> Image {
    let steps = &policy.steps;
    match policy.strategy {
        Strategy::Sequential => steps.iter().fold(img.clone(), |acc, s| s.apply(&acc, rng)),
        Strategy::OneOfSingle | Strategy::OneOfDouble => steps[rng.random_range(0..steps.len())].apply(img, rng),
        Strategy::TwoOf => {
            let mut picked = index::sample(rng, steps.len(), 2).into_vec();
            picked.sort_unstable();
            let mid = steps[picked[0]].apply(img, rng);
            steps[picked[1]].apply(&mid, rng)
        }
    }
}

/// A policy JSON error located by its field path, e.g. `elements[2].probability`.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{path}: {message}")]
pub struct ParseError {
    pub path: String,
    pub message: String,
}

impl ParseError {
    fn new(path: impl Into<String>, message: impl fmt::Display) -> Self {
        Self { path: path.into(), message: message.to_string() }
    }
}

pub fn serialize_policy(policy: &Policy) -> String {
    serde_json::to_string_pretty(&policy.to_json()).expect("policy JSON is always serializable")
}

pub fn parse_policy(text: &str) -> Result<Policy, ParseError> {
    let value: Value = serde_json::from_str(text).map_err(|e| ParseError::new("$", e))?;
    parse_policy_value(&value)
}

fn field<'a>(obj: &'a Map<String, Value>, name: &str, path: &str) -> Result<&'a Value, ParseError> {
    obj.get(name).ok_or_else(|| ParseError::new(format!("{path}.{name}"), "missing field"))
}

fn number(obj: &Map<String, Value>, name: &str, path: &str) -> Result<f64, ParseError> {
    field(obj, name, path)?
        .as_f64()
        .ok_or_else(|| ParseError::new(format!("{path}.{name}"), "expected a number"))
}

fn parse_instance(value: &Value, path: &str) -> Result<AugInstance, ParseError> {
    let obj = value.as_object().ok_or_else(|| ParseError::new(path, "expected an object"))?;
    let kind_path = format!("{path}.kind");
    let kind = field(obj, "kind", path)?
        .as_str()
        .ok_or_else(|| ParseError::new(&kind_path, "expected a string"))?
        .parse::<AugKind>()
        .map_err(|e| ParseError::new(&kind_path, e))?;
    let strength = number(obj, "strength", path)?;
    let probability = number(obj, "probability", path)?;
    AugInstance::new(kind, strength, probability).map_err(|e| {
        let name = if matches!(e, PolicyError::StrengthRange(_)) { "strength" } else { "probability" };
        ParseError::new(format!("{path}.{name}"), e)
    })
}

fn parse_policy_value(value: &Value) -> Result<Policy, ParseError> {
    let obj = value.as_object().ok_or_else(|| ParseError::new("$", "expected an object"))?;
    let strategy = field(obj, "strategy", "$")?
        .as_str()
        .ok_or_else(|| ParseError::new("$.strategy", "expected a string"))?
        .parse::<Strategy>()
        .map_err(|e| ParseError::new("$.strategy", e))?;
    let elements = field(obj, "elements", "$")?
        .as_array()
        .ok_or_else(|| ParseError::new("$.elements", "expected an array"))?;
    let mut steps = Vec::with_capacity(elements.len());
    for (i, el) in elements.iter().enumerate() {
        let path = format!("$.elements[{i}]");
        let step = if strategy.uses_pairs() {
            match el.as_array().map(Vec::as_slice) {
                Some([a, b]) => Step::Pair(parse_instance(a, &format!("{path}[0]"))?, parse_instance(b, &format!("{path}[1]"))?),
                _ => return Err(ParseError::new(path, "oneof_double elements must be 2-element arrays")),
            }
        } else {
            parse_instance(el, &path)?.into()
        };
        steps.push(step);
    }
    Policy::new(strategy, steps).map_err(|e| ParseError::new("$.elements", e))
}

impl From<AugInstance> for Step {
    fn from(a: AugInstance) -> Self {
        Step::Single(a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    fn inst(kind: AugKind, s: f64, p: f64) -> AugInstance {
        AugInstance::new(kind, s, p).unwrap()
    }

    fn noisy() -> Image {
        let mut r = rng::seeded(21);
        Image::from_fn(12, 9, |_, _| [r.random(), r.random(), r.random()]).unwrap()
    }

    #[test]
    fn instance_ranges() {
        assert_eq!(AugInstance::new(AugKind::Hue, 2.1, 0.5), Err(PolicyError::StrengthRange(2.1)));
        assert_eq!(AugInstance::new(AugKind::Hue, 1.0, 1.5), Err(PolicyError::ProbabilityRange(1.5)));
        assert!(AugInstance::new(AugKind::Hue, f64::NAN, 0.5).is_err());
    }

    #[test]
    fn gating() {
        let img = noisy();
        let mut r = rng::seeded(0);
        for kind in AugKind::ALL {
            assert_eq!(apply_one(&inst(kind, 1.3, 0.0), &img, &mut r), img, "{kind}");
        }
        let inv = inst(AugKind::Invert, 1.0, 1.0);
        let once = apply_one(&inv, &img, &mut r);
        assert_ne!(once, img);
        assert_eq!(apply_one(&inv, &once, &mut r), img);
        assert_eq!(apply_kernel(AugKind::GaussNoise, 0.0, &img, &mut r), img);
    }

    #[test]
    fn strategies() {
        let img = noisy();
        let inv = inst(AugKind::Invert, 1.0, 1.0);
        let seq = Policy::sequential([inv]).unwrap();
        assert_eq!(seq.apply(&img, &mut rng::seeded(1)), kernels::invert(&img));

        let off = Policy::new(
            Strategy::OneOfSingle,
            vec![inst(AugKind::Blur, 1.0, 0.0).into(), inst(AugKind::Hue, 1.0, 0.0).into()],
        )
        .unwrap();
        for seed in 0..10 {
            assert_eq!(off.apply(&img, &mut rng::seeded(seed)), img);
        }

        let two = Policy::new(Strategy::TwoOf, vec![inv.into(), inv.into()]).unwrap();
        assert_eq!(two.apply(&img, &mut rng::seeded(5)), img);
        let three = Policy::new(
            Strategy::TwoOf,
            vec![inv.into(), inst(AugKind::Posterize, 1.0, 1.0).into(), inv.into()],
        )
        .unwrap();
        three.apply(&img, &mut rng::seeded(5));

        let double = Policy::new(Strategy::OneOfDouble, vec![Step::Pair(inv, inv)]).unwrap();
        assert_eq!(double.apply(&img, &mut rng::seeded(9)), img);
    }

    #[test]
    fn arity_and_shape_errors() {
        let a = inst(AugKind::Hue, 1.0, 1.0);
        assert_eq!(Policy::new(Strategy::TwoOf, vec![a.into()]), Err(PolicyError::Arity(1)));
        assert_eq!(Policy::new(Strategy::Sequential, vec![]), Err(PolicyError::Empty));
        assert!(matches!(
            Policy::new(Strategy::OneOfDouble, vec![a.into()]),
            Err(PolicyError::ElementShape { index: 0, .. })
        ));
        assert!(Policy::new(Strategy::Sequential, vec![Step::Pair(a, a)]).is_err());
    }

    #[test]
    fn json_round_trip_and_errors() {
        let p = Policy::sequential([inst(AugKind::Hue, 1.16, 0.28)]).unwrap();
        assert_eq!(parse_policy(&serialize_policy(&p)).unwrap(), p);

        let err = parse_policy(r#"{"strategy":"sequential","elements":[{"kind":"warp","strength":1,"probability":0.5}]}"#)
            .unwrap_err();
        assert_eq!(err.path, "$.elements[0].kind");
        assert!(err.message.contains("warp"));

        let err = parse_policy(r#"{"strategy":"sequential","elements":[{"kind":"hue","strength":1,"probability":1.5}]}"#)
            .unwrap_err();
        assert_eq!(err.path, "$.elements[0].probability");

        let err = parse_policy(r#"{"strategy":"twoof","elements":[{"kind":"hue","strength":1,"probability":0.5}]}"#)
            .unwrap_err();
        assert_eq!(err.path, "$.elements");

        let err = parse_policy(r#"{"strategy":"oneof_double","elements":[{"kind":"hue","strength":1,"probability":0.5}]}"#)
            .unwrap_err();
        assert_eq!(err.path, "$.elements[0]");
        assert!(parse_policy(r#"{"strategy":"sideways","elements":[]}"#).unwrap_err().path == "$.strategy");
        assert!(parse_policy("not json").is_err());
    }
}
