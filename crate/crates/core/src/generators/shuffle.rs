use rand::seq::SliceRandom;

use crate::question::QuestionBattery;
use crate::rng::stream;

/// Permutes every question's options with a stream keyed by the question id
/// and records the permutation in its provenance.
pub fn shuffle_option_order(mut battery: QuestionBattery, seed: u64) -> QuestionBattery {
    for q in battery.questions.iter_mut() {
        let mut rng = stream(seed, &format!("shuffle:{}", q.id), 0);
        let mut order: Vec<usize> = (0..q.option_count()).collect();
        order.shuffle(&mut rng);
        q.options = q.options.permuted(&order);
        q.provenance.order = order;
    }
    battery
}
