from .finite_temp import (
    FiniteTempParams,
    finite_temp_generator,
    finite_temp_limit_errors,
    finite_temp_markov_rho,
    finite_temp_superop,
)
from .fmo import FMOParams, fmo_derive, rate_to_wavenumber, wavenumber_to_rate, wavenumber_to_time_ps
from .resonance import (
    ResonanceParams,
    embed_initial,
    interaction_heff,
    markov_limit_rho,
    resonance_amplitudes,
    resonance_generator,
    resonance_model,
    resonance_rho_s,
    strong_coupling_errors,
    strong_coupling_limit_rho,
    traced_propagation,
    van_hove_errors,
    van_hove_rescale,
)
