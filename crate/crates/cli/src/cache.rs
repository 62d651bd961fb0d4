use std::path::{Path, PathBuf};

use codedc::codes::GeneratorMatrix;
use codedc::projective::PlanSet;

use crate::output::{CliError, CliResult};

/// On-disk JSON caches for generator matrices and projection plan sets,
/// keyed by construction parameters. Construction is cheap and seeded, so a
/// cached file is never trusted as a source of truth: generators are compared
/// against a fresh rebuild and plan sets re-validate themselves. The cache
/// buys an inspectable record of exactly what a run used; a stale or edited
/// file is an error, not a silent substitution.
pub struct CacheDir {
    dir: PathBuf,
}

impl CacheDir {
    pub fn new(dir: &Path) -> CliResult<Self> {
        std::fs::create_dir_all(dir)
            .map_err(|e| CliError::Io(format!("creating cache dir {}: {e}", dir.display())))?;
        Ok(CacheDir { dir: dir.to_path_buf() })
    }

    fn read(&self, name: &str) -> CliResult<Option<String>> {
        let path = self.dir.join(name);
        if !path.exists() {
            return Ok(None);
        }
        std::fs::read_to_string(&path)
            .map(Some)
            .map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))
    }

    fn write(&self, name: &str, text: &str) -> CliResult<()> {
        let path = self.dir.join(name);
        std::fs::write(&path, text)
            .map_err(|e| CliError::Io(format!("writing {}: {e}", path.display())))
    }

    /// Returns the freshly built generator after reconciling it with the
    /// cache: first use writes the file, later uses demand equality.
    pub fn generator(
        &self,
        key: &str,
        build: impl FnOnce() -> codedc::Result<GeneratorMatrix>,
    ) -> CliResult<GeneratorMatrix> {
        let name = format!("gen-{key}.json");
        let fresh = build()?;
        match self.read(&name)? {
            Some(text) => {
                let cached = GeneratorMatrix::from_json(&text)?;
                if cached != fresh {
                    return Err(CliError::Lib(codedc::Error::Input(format!(
                        "generator cache {name} does not match its re-derivation; \
                         refusing stale or edited cache"
                    ))));
                }
            }
            None => self.write(&name, &fresh.to_json())?,
        }
        Ok(fresh)
    }

    /// Loads a plan set through its self-validating JSON form, writing it on
    /// first use.
    pub fn plan_set(&self, m: usize, r: usize) -> CliResult<PlanSet> {
        let name = format!("plans-m{m}-r{r}.json");
        match self.read(&name)? {
            Some(text) => {
                let set = PlanSet::from_json(&text)?;
                if set.m != m || set.r != r {
                    return Err(CliError::Lib(codedc::Error::Input(format!(
                        "plan cache {name} holds rm(m={}, r={})",
                        set.m, set.r
                    ))));
                }
                Ok(set)
            }
            None => {
                let set = PlanSet::build(m, r)?;
                self.write(&name, &set.to_json())?;
                Ok(set)
            }
        }
    }
}

/// Builds a generator straight or through the cache when one is configured.
pub fn generator_via(
    cache: &Option<CacheDir>,
    key: &str,
    build: impl FnOnce() -> codedc::Result<GeneratorMatrix>,
) -> CliResult<GeneratorMatrix> {
    match cache {
        Some(dir) => dir.generator(key, build),
        None => Ok(build()?),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use codedc::codes;

    #[test]
    fn generator_cache_round_trips_and_rejects_tampering() {
        let tmp = tempfile::tempdir().unwrap();
        let cache = CacheDir::new(tmp.path()).unwrap();
        let build = || codes::rm_generator(3, 2);
        let first = cache.generator("rm-m3-r2", build).unwrap();
        let second = cache.generator("rm-m3-r2", build).unwrap();
        assert_eq!(first, second);
        // Edit a field the JSON loader itself cannot cross-check; only the
        // rebuild comparison can catch it.
        let path = tmp.path().join("gen-rm-m3-r2.json");
        let text = std::fs::read_to_string(&path).unwrap().replace("\"r\": 2", "\"r\": 1");
        assert!(text.contains("\"r\": 1"));
        std::fs::write(&path, text).unwrap();
        let err = cache.generator("rm-m3-r2", build).unwrap_err();
        assert_eq!(err.exit_code(), 2, "{err}");
        assert!(err.to_string().contains("re-derivation"), "{err}");
    }

    #[test]
    fn plan_cache_validates_on_load() {
        let tmp = tempfile::tempdir().unwrap();
        let cache = CacheDir::new(tmp.path()).unwrap();
        let set = cache.plan_set(3, 2).unwrap();
        assert_eq!(set.plans.len(), 3);
        let again = cache.plan_set(3, 2).unwrap();
        assert_eq!(set, again);
    }
}
