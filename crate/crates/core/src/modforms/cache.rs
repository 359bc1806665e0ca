//! On-disk cache of integral q-expansions under `$VF_CACHE_DIR`, one file per
//! `(k, N)` with lines `n a(n)`.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use num_bigint::BigInt;

use crate::error::ModformError;

pub const CACHE_ENV: &str = "VF_CACHE_DIR";

pub fn cache_dir() -> Option<PathBuf> {
    std::env::var_os(CACHE_ENV).map(PathBuf::from).filter(|p| !p.as_os_str().is_empty())
}

pub fn cache_path(dir: &std::path::Path, k: u32, n: usize) -> PathBuf {
    dir.join(format!("qexp_k{k}_N{n}.txt"))
}

pub fn load(k: u32, n: usize) -> Result<Option<Vec<BigInt>>, ModformError> {
    let Some(dir) = cache_dir() else {
        return Ok(None);
    };
    let path = cache_path(&dir, k, n);
    let Ok(text) = fs::read_to_string(&path) else {
        return Ok(None);
    };
    let mut out = vec![BigInt::default(); n + 1];
    let mut seen = 0usize;
    for line in text.lines().filter(|l| !l.trim().is_empty()) {
        let mut it = line.split_whitespace();
        let (Some(i), Some(a), None) = (it.next(), it.next(), it.next()) else {
            return Err(ModformError::Io(format!("{}: malformed line {line:?}", path.display())));
        };
        let i: usize = i
            .parse()
            .map_err(|_| ModformError::Io(format!("{}: bad index {i:?}", path.display())))?;
        let a: BigInt = a
            .parse()
            .map_err(|_| ModformError::Io(format!("{}: bad coefficient {a:?}", path.display())))?;
        if i > n {
            return Err(ModformError::Io(format!("{}: index {i} beyond {n}", path.display())));
        }
        out[i] = a;
        seen += 1;
    }
    if seen != n + 1 {
        return Err(ModformError::Io(format!("{}: {seen} lines, expected {}", path.display(), n + 1)));
    }
    Ok(Some(out))
}

pub fn store(k: u32, coeffs: &[BigInt]) -> Result<(), ModformError> {
    let Some(dir) = cache_dir() else {
        return Ok(());
    };
    fs::create_dir_all(&dir).map_err(|e| ModformError::Io(e.to_string()))?;
    let n = coeffs.len() - 1;
    let path = cache_path(&dir, k, n);
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    let mut f = fs::File::create(&tmp).map_err(|e| ModformError::Io(e.to_string()))?;
    let mut buf = String::with_capacity(coeffs.len() * 16);
    for (i, a) in coeffs.iter().enumerate() {
        buf.push_str(&format!("{i} {a}\n"));
    }
    f.write_all(buf.as_bytes()).map_err(|e| ModformError::Io(e.to_string()))?;
    fs::rename(&tmp, &path).map_err(|e| ModformError::Io(e.to_string()))?;
    Ok(())
}
