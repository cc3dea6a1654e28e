use crate::hmm::{HmmError, HmmModel};

/// Best state path and its log probability.
#[derive(Debug, Clone, PartialEq)]
pub struct ViterbiPath {
    pub states: Vec<usize>,
    pub log_probability: f64,
}

fn ln(p: f64) -> f64 {
    if p > 0.0 {
        p.ln()
    } else {
        f64::NEG_INFINITY
    }
}

/// Log-space Viterbi over encoded observations. Ties resolve to the lowest
/// state index.
pub fn viterbi(model: &HmmModel, obs: &[usize]) -> Result<ViterbiPath, HmmError> {
    if obs.is_empty() {
        return Err(HmmError::EmptyCommand);
    }
    let n = model.n_states();
    if n == 0 {
        return Err(HmmError::ZeroProbability);
    }
    let log_trans: Vec<Vec<f64>> = model.transitions.iter().map(|r| r.iter().map(|&p| ln(p)).collect()).collect();
    let mut delta: Vec<f64> = (0..n).map(|i| ln(model.initial[i]) + ln(model.emissions[i][obs[0]])).collect();
    let mut back: Vec<Vec<usize>> = Vec::with_capacity(obs.len());
    for &o in &obs[1..] {
        let mut next = vec![f64::NEG_INFINITY; n];
        let mut arg = vec![0usize; n];
        for j in 0..n {
            let e = ln(model.emissions[j][o]);
            for i in 0..n {
                let s = delta[i] + log_trans[i][j];
                if s > next[j] {
                    next[j] = s;
                    arg[j] = i;
                }
            }
            next[j] += e;
        }
        back.push(arg);
        delta = next;
    }
    let (mut last, mut best) = (0, f64::NEG_INFINITY);
    for (i, &d) in delta.iter().enumerate() {
        if d > best && model.can_end(i) {
            best = d;
            last = i;
        }
    }
    if best == f64::NEG_INFINITY {
        return Err(HmmError::ZeroProbability);
    }
    let mut states = vec![last; obs.len()];
    for t in (0..back.len()).rev() {
        states[t] = back[t][states[t + 1]];
    }
    Ok(ViterbiPath { states, log_probability: best })
}

/// Log probability of a given state path, `-inf` if impossible.
pub fn path_log_probability(model: &HmmModel, obs: &[usize], path: &[usize]) -> f64 {
    let mut lp = ln(model.initial[path[0]]) + ln(model.emissions[path[0]][obs[0]]);
    for t in 1..path.len() {
        lp += ln(model.transitions[path[t - 1]][path[t]]) + ln(model.emissions[path[t]][obs[t]]);
    }
    lp
}
