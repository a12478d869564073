use super::response::best_response_in;
use super::space::SequenceSpace;
use crate::error::Result;
use crate::game::TruncatedGame;
use crate::scalar::Scalar;
use crate::strategy::BehavioralStrategy;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    BruteForce,
    SequenceForm,
    FictitiousPlay,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::BruteForce => "brute-force",
            Method::SequenceForm => "sequence-form",
            Method::FictitiousPlay => "fictitious-play",
        }
    }
}

/// Best-response bounds of a reported strategy pair: `x` guarantees at
/// least `lower`, `y` concedes at most `upper`.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate<T> {
    pub lower: T,
    pub upper: T,
    pub x_response: BehavioralStrategy<T>,
    pub y_response: BehavioralStrategy<T>,
}

impl<T: Scalar> Certificate<T> {
    pub fn gap(&self) -> T {
        self.upper.clone() - self.lower.clone()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValueReport<T> {
    pub method: Method,
    pub value: T,
    pub x: BehavioralStrategy<T>,
    pub y: BehavioralStrategy<T>,
    pub certificate: Certificate<T>,
}

impl<T: Scalar> ValueReport<T> {
    /// Largest distance from the reported value to either bound.
    pub fn max_gap(&self) -> T {
        let a = self.certificate.upper.clone() - self.value.clone();
        let b = self.value.clone() - self.certificate.lower.clone();
        if a > b { a } else { b }
    }
}

pub(crate) fn certify<T: Scalar>(
    g: &TruncatedGame,
    x: &BehavioralStrategy<T>,
    y: &BehavioralStrategy<T>,
    one: &SequenceSpace,
    two: &SequenceSpace,
) -> Result<Certificate<T>> {
    let (lower, y_response) = best_response_in(g, x, two)?;
    let (upper, x_response) = best_response_in(g, y, one)?;
    Ok(Certificate {
        lower,
        upper,
        x_response,
        y_response,
    })
}
