use super::{check_strategy, piecewise::xlogx, SolverError, SymmetricGame};

/// `max_π u(π, σ) - u(σ', σ)`.
pub fn regret(sigma_prime: &[f64], sigma: &[f64], game: &SymmetricGame) -> Result<f64, SolverError> {
    game.check_strategy(sigma_prime)?;
    game.check_strategy(sigma)?;
    let against = game.payoffs_against(sigma);
    let best = against.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let own: f64 = against.iter().zip(sigma_prime).map(|(u, s)| u * s).sum();
    Ok((best - own).max(0.0))
}

/// Regret of each seat against the other: `Regret(σ₁, σ₂) + Regret(σ₂, σ₁)`.
pub fn sum_regret(profile: (&[f64], &[f64]), game: &SymmetricGame) -> Result<f64, SolverError> {
    Ok(regret(profile.0, profile.1, game)? + regret(profile.1, profile.0, game)?)
}

/// NE-regret of pure strategy `pi` against the equilibrium `sigma_star`.
pub fn ne_regret_score(game: &SymmetricGame, pi: usize, sigma_star: &[f64]) -> Result<f64, SolverError> {
    check_index(game, pi)?;
    game.check_strategy(sigma_star)?;
    let against = game.payoffs_against(sigma_star);
    let best = against.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok((best - against[pi]).max(0.0))
}

/// Mean payoff of `pi` against every strategy, itself included.
pub fn uniform_score(game: &SymmetricGame, pi: usize) -> Result<f64, SolverError> {
    check_index(game, pi)?;
    Ok(game.payoffs[pi].iter().sum::<f64>() / game.n() as f64)
}

/// Mean payoff of `pi` against the other strategies; for a one-strategy
/// game, the self-play payoff.
pub fn uniform_score_excluding_self(game: &SymmetricGame, pi: usize) -> Result<f64, SolverError> {
    check_index(game, pi)?;
    let n = game.n();
    if n == 1 {
        return Ok(game.payoffs[0][0]);
    }
    let total: f64 = game.payoffs[pi].iter().enumerate().filter(|(c, _)| *c != pi).map(|(_, u)| u).sum();
    Ok(total / (n - 1) as f64)
}

/// Nash-bargaining score `u(π, σ*) · u(σ*, π)`.
pub fn ne_nbs(game: &SymmetricGame, pi: usize, sigma_star: &[f64]) -> Result<f64, SolverError> {
    check_index(game, pi)?;
    game.check_strategy(sigma_star)?;
    Ok(game.payoffs_against(sigma_star)[pi] * game.payoffs_of(sigma_star)[pi])
}

/// Shannon entropy in nats.
pub fn entropy(sigma: &[f64]) -> f64 {
    -sigma.iter().map(|&p| xlogx(p)).sum::<f64>()
}

fn check_index(game: &SymmetricGame, pi: usize) -> Result<(), SolverError> {
    if pi >= game.n() {
        return Err(SolverError::Dimension { expected: game.n(), got: pi + 1 });
    }
    check_strategy(&super::pure(game.n(), pi), game.n())
}
