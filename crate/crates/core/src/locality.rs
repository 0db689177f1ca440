//! Harness for σ-stability: an operation commutes with concatenation when
//! applying it to a spliced input gives the splice of its outputs.

use crate::error::Result;
use crate::l0::Concatenate;
use crate::measure::PartitionOfUnity;

/// Runs `op` both ways and reports whether the results agree.
pub fn commutes_with_concatenation<T, U, F>(items: &[T], partition: &PartitionOfUnity, op: F) -> Result<bool>
where
    T: Concatenate,
    U: Concatenate + PartialEq,
    F: Fn(&T) -> Result<U>,
{
    let spliced = op(&T::concatenate(items, partition)?)?;
    let outputs = items.iter().map(&op).collect::<Result<Vec<_>>>()?;
    Ok(spliced == U::concatenate(&outputs, partition)?)
}
