//! Multi-polariton labels, occupation numbers, symmetric tensors and permanents.

mod permanent;
mod tensor;
mod tuple;

pub use permanent::{glynn, naive, permanent, permanent_with, ryser, PermanentAlgorithm};
pub use tensor::{entangled_pair, product_pair, single_mode, AmplitudeRecord, AmplitudeTensor, PolaritonState};
pub use tuple::{
    canonical_tuples, distinct_permutations, enumerate_sectors, multisets, occupation_to_tuples,
    tuple_to_occupation, OccupationState, PolaritonTuple, Signature,
};
