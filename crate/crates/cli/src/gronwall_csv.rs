//! Sequences for the Gronwall check: `# key=value` parameter lines
//! (dt, n0, n1, a1, a2, a3), a `xi,eta,zeta` header, then one row per step.

use vort2d_core::stability::GronwallInput;

pub fn parse(text: &str) -> Result<GronwallInput, String> {
    let mut params: [Option<f64>; 6] = [None; 6];
    const KEYS: [&str; 6] = ["dt", "n0", "n1", "a1", "a2", "a3"];
    let (mut xi, mut eta, mut zeta) = (Vec::new(), Vec::new(), Vec::new());
    let mut header = false;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            let Some((k, v)) = rest.split_once('=') else { continue };
            let k = k.trim();
            let Some(slot) = KEYS.iter().position(|&name| name == k) else {
                return Err(format!("{line_no}: unknown parameter `{k}`"));
            };
            let v: f64 = v.trim().parse().map_err(|_| format!("{line_no}: `{k}` is not a number"))?;
            if params[slot].replace(v).is_some() {
                return Err(format!("{line_no}: duplicate parameter `{k}`"));
            }
            continue;
        }
        if !header {
            let cols: Vec<&str> = line.split(',').map(str::trim).collect();
            if cols != ["xi", "eta", "zeta"] {
                return Err(format!("{line_no}: expected header `xi,eta,zeta`"));
            }
            header = true;
            continue;
        }
        let vals: Vec<f64> = line
            .split(',')
            .map(|c| c.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| format!("{line_no}: malformed row"))?;
        let [x, e, z] = vals[..] else {
            return Err(format!("{line_no}: expected three columns"));
        };
        xi.push(x);
        eta.push(e);
        zeta.push(z);
    }
    if !header {
        return Err("missing header `xi,eta,zeta`".into());
    }
    let get = |i: usize| params[i].ok_or_else(|| format!("missing parameter `{}`", KEYS[i]));
    let index = |i: usize| -> Result<usize, String> {
        let v = get(i)?;
        if v < 0.0 || v.fract() != 0.0 {
            return Err(format!("`{}` must be a nonnegative integer", KEYS[i]));
        }
        Ok(v as usize)
    };
    Ok(GronwallInput {
        dt: get(0)?,
        n0: index(1)?,
        n1: index(2)?,
        a1: get(3)?,
        a2: get(4)?,
        a3: get(5)?,
        xi,
        eta,
        zeta,
    })
}
