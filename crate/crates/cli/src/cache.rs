//! On-disk cache of composed PLDs.
//!
//! Each entry is a pair of files `<key>-remove.pld` and `<key>-add.pld` in
//! the `privsel-pld v1` text format, where `<key>` is the SHA-256 of the
//! exact bit patterns of `(q, sigma, T, h)` plus the grid settings. Broken
//! or mismatching entries are recomputed and overwritten.

use std::cell::RefCell;
use std::fs;
use std::path::{Path, PathBuf};

use privsel::pld::{DiscretePLD, GridSpec, SubsampledGaussianAccountant, SubsampledGaussianParams};
use privsel::scenarios::{AccountantSource, Compose};
use sha2::{Digest, Sha256};

pub const CACHE_ENV: &str = "PRIVSEL_PLD_CACHE";

/// Disk cache when the environment names a directory, plus a memo of the
/// last accountant so sweeps over the count do not recompose.
#[derive(Debug, Default)]
pub struct PldCache {
    dir: Option<PathBuf>,
    last: RefCell<Option<(String, SubsampledGaussianAccountant)>>,
}

impl PldCache {
    pub fn from_env() -> Self {
        Self {
            dir: std::env::var_os(CACHE_ENV).filter(|v| !v.is_empty()).map(PathBuf::from),
            last: RefCell::default(),
        }
    }

    pub fn key(params: &SubsampledGaussianParams, grid: &GridSpec) -> String {
        let mut h = Sha256::new();
        h.update(b"privsel-pld v1\n");
        h.update(params.q.to_bits().to_le_bytes());
        h.update(params.sigma.to_bits().to_le_bytes());
        h.update(params.steps.to_le_bytes());
        h.update(grid.spacing.to_bits().to_le_bytes());
        h.update(grid.tail_mass.to_bits().to_le_bytes());
        h.update(format!("{:?}", grid.discretization).as_bytes());
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }

    fn load(dir: &Path, key: &str, grid: &GridSpec) -> Option<(DiscretePLD, DiscretePLD)> {
        let read = |side: &str| -> Option<DiscretePLD> {
            let text = fs::read_to_string(dir.join(format!("{key}-{side}.pld"))).ok()?;
            let pld = DiscretePLD::from_text(&text).ok()?;
            (pld.spacing() == grid.spacing).then_some(pld)
        };
        Some((read("remove")?, read("add")?))
    }

    fn store(dir: &Path, key: &str, acc: &SubsampledGaussianAccountant) -> std::io::Result<()> {
        fs::create_dir_all(dir)?;
        for (side, pld) in [("remove", &acc.remove), ("add", &acc.add)] {
            let path = dir.join(format!("{key}-{side}.pld"));
            let tmp = dir.join(format!("{key}-{side}.pld.tmp{}", std::process::id()));
            fs::write(&tmp, pld.to_text())?;
            fs::rename(&tmp, &path)?;
        }
        Ok(())
    }
}

impl AccountantSource for PldCache {
    fn accountant(
        &self,
        params: &SubsampledGaussianParams,
        grid: &GridSpec,
    ) -> privsel::Result<SubsampledGaussianAccountant> {
        let key = Self::key(params, grid);
        if let Some((k, acc)) = &*self.last.borrow() {
            if *k == key {
                return Ok(acc.clone());
            }
        }
        let acc = match &self.dir {
            None => Compose.accountant(params, grid)?,
            Some(dir) => match Self::load(dir, &key, grid) {
                Some((remove, add)) => SubsampledGaussianAccountant::from_plds(*params, *grid, remove, add),
                None => {
                    let acc = Compose.accountant(params, grid)?;
                    // a read-only cache directory only costs the recomputation next time
                    if let Err(e) = Self::store(dir, &key, &acc) {
                        eprintln!("warning: could not write PLD cache in {}: {e}", dir.display());
                    }
                    acc
                }
            },
        };
        *self.last.borrow_mut() = Some((key, acc.clone()));
        Ok(acc)
    }
}
