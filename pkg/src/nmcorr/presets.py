"""Named scenario presets for the command-line interface and demos."""

from .config import RunConfig

__all__ = ["PRESETS", "get_preset", "preset_lines"]

_SQ3_HALF = "0.8660254037844386"  # sqrt(3)/2


def fig1() -> RunConfig:
    """Reference scenario of the bundled demo figure 1.

    Two-level emitter (splitting 3) with lowering coupling to an Ohmic bath,
    gamma = 0.1, cutoff 5, kT = 1, t2 = 1, initial pure state
    (sqrt(3)/2, 1/2).  The record is long enough for spectra.
    """
    return RunConfig(
        omega_a=3.0, coupling="sigma_minus",
        gamma=0.1, cutoff=5.0, kt=1.0,
        initial_kind="pure", initial_values=f"{_SQ3_HALF} 0 0.5 0",
        t2=1.0, t1_max=41.0, dt=0.01,
        modes="all", pairs="pp mm mz zm pz zp zz mp pm",
        spectrum_pair="pm", omega_max=8.0, omega_step=0.25, series_part="real",
    )


def fig1d() -> RunConfig:
    """Stronger coupling (gamma = 0.35) and a mixed initial state.

    The off-diagonal density matrix elements are a quarter of the pure
    state's (sqrt(3)/4 -> sqrt(3)/16).
    """
    cfg = fig1()
    cfg.gamma = 0.35
    cfg.initial_kind = "density"
    s316 = repr(3 ** 0.5 / 16)
    cfg.initial_values = f"0.75 0 {s316} 0 {s316} 0 0.25 0"
    return cfg


def pure_dephasing() -> RunConfig:
    """Dephasing coupling (sigma_z): exactly solvable validation model."""
    return RunConfig(
        omega_a=1.0, coupling="sigma_z",
        gamma=0.1, cutoff=5.0, kt=1.0,
        initial_kind="pure", initial_values=f"{_SQ3_HALF} 0 0.5 0",
        t2=1.0, t1_max=6.0, dt=0.005,
        modes="nm-full", pairs="pm zz",
        oracle_n_modes=200, oracle_fock_cutoff=2, oracle_omega_max=40.0,
        oracle_method="dephasing", oracle_pair="pm", oracle_t_span=4.0,
    )


def markov_recovery() -> RunConfig:
    """Large cutoff (100): the non-Markovian transient window shrinks."""
    return RunConfig(
        omega_a=3.0, coupling="sigma_minus",
        gamma=0.1, cutoff=100.0, kt=1.0,
        initial_kind="pure", initial_values=f"{_SQ3_HALF} 0 0.5 0",
        t2=1.0, t1_max=6.0, dt=0.0005,
        modes="all", pairs="pm",
        spectrum_pair="pm", omega_max=12.0, omega_step=0.25,
    )


def oracle_scaling() -> RunConfig:
    """Eight-mode discretized bath for exact-reference scaling studies."""
    return RunConfig(
        omega_a=3.0, coupling="sigma_minus",
        gamma=0.02, cutoff=5.0, kt=1.0,
        initial_kind="pure", initial_values=f"{_SQ3_HALF} 0 0.5 0",
        t2=1.0, t1_max=4.0, dt=0.0025,
        modes="nm-full", pairs="zz",
        oracle_n_modes=8, oracle_fock_cutoff=4, oracle_omega_max=24.0,
        oracle_method="sector", oracle_gammas="0.02 0.01", oracle_pair="zz",
        oracle_t_span=3.0,
    )


PRESETS = {
    "fig1": fig1,
    "fig1d": fig1d,
    "pure_dephasing": pure_dephasing,
    "markov_recovery": markov_recovery,
    "oracle_scaling": oracle_scaling,
}


def get_preset(name: str) -> RunConfig:
    try:
        return PRESETS[name]()
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; available: {sorted(PRESETS)}") from None


def preset_lines():
    out = []
    for name in sorted(PRESETS):
        doc = (PRESETS[name].__doc__ or "").strip().splitlines()[0]
        out.append(f"{name:18s} {doc}")
    return out
