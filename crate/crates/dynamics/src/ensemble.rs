//! Ensemble evolution, members advanced two at a time.

use field_core::{PhaseState, RngStream};
use rayon::prelude::*;

use crate::integrator::{Integrator, Splitting};
use crate::Result;

/// Advances every member `steps` steps from step index `start`. Member k is
/// driven by `streams[k]` exactly as in [`Integrator::step`]. Members are paired
/// (0,1), (2,3), ... and pairs run in parallel; the result does not depend on
/// scheduling. For Strang
/// splitting the closing half kick of one step and the opening half kick of the
/// next are merged into one full kick, which agrees with repeated single steps
/// up to roundoff.
pub fn evolve_ensemble(
    integ: &Integrator,
    states: &mut [PhaseState],
    streams: &[RngStream],
    start: u64,
    steps: u64,
) -> Result<()> {
    assert_eq!(states.len(), streams.len());
    if steps == 0 {
        return Ok(());
    }
    let h = integ.scheme().dt;
    let strang = integ.scheme().splitting == Splitting::Strang;
    states.par_chunks_mut(2).zip(streams.par_chunks(2)).try_for_each(|(chunk, sc)| -> Result<()> {
        match chunk {
            [a, b] => {
                if !strang {
                    for k in start..start + steps {
                        integ.step_pair(a, &sc[0], b, &sc[1], k)?;
                    }
                    return Ok(());
                }
                integ.kick_pair(a, b, 0.5 * h)?;
                for k in start..start + steps {
                    integ.linear(a, &mut sc[0].fork(k));
                    integ.linear(b, &mut sc[1].fork(k));
                    let last = k + 1 == start + steps;
                    integ.kick_pair(a, b, if last { 0.5 * h } else { h })?;
                    let t = (k + 1) as f64 * h;
                    integ.check(a, t)?;
                    integ.check(b, t)?;
                }
            }
            [a] => {
                for k in start..start + steps {
                    integ.step(a, &sc[0], k)?;
                }
            }
            _ => unreachable!(),
        }
        Ok(())
    })
}
