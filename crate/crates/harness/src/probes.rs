use bundlecalc_core::fingroup::{abelian_groups_up_to, default_nonabelian_probes, FiniteGroup};
use std::sync::Arc;

/// A named test object.
#[derive(Clone, Debug)]
pub struct Probe {
    pub name: String,
    pub group: Arc<FiniteGroup>,
}

fn probe((name, group): (String, FiniteGroup)) -> Probe {
    Probe { name, group: Arc::new(group) }
}

/// All abelian groups of order at most `max_order`.
pub fn abelian_probes(max_order: usize) -> Vec<Probe> {
    abelian_groups_up_to(max_order.min(12)).into_iter().map(probe).collect()
}

/// Abelian groups of order at most `min(max_order, 12)`, then S3, D4 and
/// Q8 where they fit.
pub fn default_probes(max_order: usize) -> Vec<Probe> {
    let mut out = abelian_probes(max_order);
    out.extend(default_nonabelian_probes().into_iter().filter(|(_, g)| g.order() <= max_order).map(probe));
    out
}
