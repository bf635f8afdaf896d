"""Single-snapshot uniform-linear-array signal model.

Steering vectors, angular estimation grids, basis-coherence diagnostics and
noisy snapshot generation for the direction-of-arrival experiments. Angles
are degrees at the API boundary and live in the half-open interval
[-90, 90); sensors are spaced half a wavelength apart.
"""

import json
import math
from dataclasses import dataclass

import numpy as np

from .linalg import as_vector


def steering_vector(theta_deg, n_sensors):
    """Unit-norm array response for a far-field source at ``theta_deg``.

    Element ``m`` carries phase ``exp(1j * pi * m * sin(theta))`` for
    half-wavelength spacing, and the vector is scaled by ``1/sqrt(n)``.

    Parameters
    ----------
    theta_deg : float
        Look direction in degrees, within [-90, 90).
    n_sensors : int
        Number of array elements, at least 1.

    Returns
    -------
    ndarray
        Complex response vector of shape ``(n_sensors,)`` with unit l2 norm.
    """
    if not -90.0 <= theta_deg < 90.0:
        raise ValueError(f"look direction {theta_deg} outside [-90, 90)")
    n = int(n_sensors)
    if n < 1:
        raise ValueError("n_sensors must be at least 1")
    phase = np.pi * math.sin(math.radians(theta_deg))
    return np.exp(1j * phase * np.arange(n)) / math.sqrt(n)


@dataclass(frozen=True)
class SteeringGrid:
    """Angular estimation grid together with its steering matrix.

    ``matrix`` holds one unit-norm steering column per grid angle; columns
    are ordered by strictly increasing angle.
    """

    angles_deg: np.ndarray
    spacing_deg: float
    n_sensors: int
    matrix: np.ndarray

    @property
    def p(self):
        return self.angles_deg.shape[0]

    def nearest_index(self, theta_deg):
        """Index of the grid angle closest to ``theta_deg``.

        Exact midpoints round toward the larger angle; the result is clamped
        to the grid, so angles just below +90 map to the last column.
        """
        if not -90.0 <= theta_deg < 90.0:
            raise ValueError(f"look direction {theta_deg} outside [-90, 90)")
        idx = math.floor((theta_deg + 90.0) / self.spacing_deg + 0.5)
        return int(min(max(idx, 0), self.p - 1))


def build_grid(spacing_deg, n_sensors):
    """Construct the grid ``{-90, -90+spacing, ..., 90-spacing}``.

    Parameters
    ----------
    spacing_deg : float
        Grid spacing in degrees; must divide 180 evenly.
    n_sensors : int
        Number of array elements.

    Returns
    -------
    SteeringGrid
        Grid with ``p = 180/spacing`` angles and an ``n_sensors x p``
        steering matrix assembled column-wise.
    """
    ratio = 180.0 / spacing_deg
    p = int(round(ratio))
    if p < 1 or abs(ratio - p) > 1e-9:
        raise ValueError(f"spacing {spacing_deg} does not divide 180 evenly")
    angles = -90.0 + spacing_deg * np.arange(p)
    n = int(n_sensors)
    if n < 1:
        raise ValueError("n_sensors must be at least 1")
    phases = np.pi * np.sin(np.deg2rad(angles))
    matrix = np.exp(1j * np.outer(np.arange(n), phases)) / math.sqrt(n)
    return SteeringGrid(angles_deg=angles, spacing_deg=float(spacing_deg),
                        n_sensors=n, matrix=matrix)


@dataclass(frozen=True)
class Scenario:
    """A simulation set-up: sources, their powers and the grid geometry.

    Source angles may fall between grid points; magnitudes live in (0, 1].
    """

    label: str
    doas_deg: tuple
    magnitudes: tuple
    grid_spacing_deg: float
    n_sensors: int

    def __post_init__(self):
        doas = tuple(float(t) for t in self.doas_deg)
        mags = tuple(float(m) for m in self.magnitudes)
        object.__setattr__(self, "doas_deg", doas)
        object.__setattr__(self, "magnitudes", mags)
        if len(doas) == 0:
            raise ValueError("scenario needs at least one source")
        if len(doas) != len(mags):
            raise ValueError("doas_deg and magnitudes must have equal length")
        if len(set(doas)) != len(doas):
            raise ValueError("source angles must be distinct")
        for t in doas:
            if not -90.0 <= t < 90.0:
                raise ValueError(f"source angle {t} outside [-90, 90)")
        for m in mags:
            if not 0.0 < m <= 1.0:
                raise ValueError(f"source magnitude {m} outside (0, 1]")
        if len(doas) >= self.n_sensors:
            raise ValueError("need fewer sources than sensors")

    @property
    def k(self):
        """Number of sources."""
        return len(self.doas_deg)

    def to_dict(self):
        return {
            "label": self.label,
            "doas_deg": list(self.doas_deg),
            "magnitudes": list(self.magnitudes),
            "grid_spacing_deg": self.grid_spacing_deg,
            "n_sensors": self.n_sensors,
        }

    @classmethod
    def from_dict(cls, data):
        try:
            return cls(
                label=str(data["label"]),
                doas_deg=tuple(data["doas_deg"]),
                magnitudes=tuple(data["magnitudes"]),
                grid_spacing_deg=float(data["grid_spacing_deg"]),
                n_sensors=int(data["n_sensors"]),
            )
        except KeyError as missing:
            raise ValueError(f"scenario config missing field {missing}") from None


def load_scenario(path):
    """Read a :class:`Scenario` from a JSON file (see ``Scenario.to_dict``)."""
    with open(path, "r", encoding="utf-8") as fh:
        return Scenario.from_dict(json.load(fh))


def save_scenario(scenario, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(scenario.to_dict(), fh, indent=2)
        fh.write("\n")


#: Built-in two-to-four source set-ups used throughout the benchmark suite.
PRESETS = {
    1: Scenario("setup-1", (-5.0, 3.0, 6.0), (0.9, 1.0, 1.0), 1.0, 40),
    2: Scenario("setup-2", (-6.0, 2.0), (0.9, 1.0), 1.0, 40),
    3: Scenario("setup-3", (44.0, 52.0), (0.9, 1.0), 1.0, 40),
    4: Scenario("setup-4", (43.0, 44.0, 52.0), (0.8, 0.7, 1.0), 1.0, 40),
    5: Scenario("setup-5", (-8.7, -3.8, -3.5, 9.7), (0.9, 0.1, 1.0, 0.4), 1.0, 40),
    6: Scenario("setup-6", (-48.5, -46.4, -31.5, -22.0), (0.8, 1.0, 0.9, 0.4), 2.0, 30),
    7: Scenario("setup-7", (6.0, 8.0, 14.0, 18.0), (0.7, 1.0, 0.6, 0.7), 2.0, 30),
}


def preset(setup_id):
    """Return one of the built-in scenarios by its 1-based id."""
    try:
        return PRESETS[int(setup_id)]
    except (KeyError, ValueError):
        raise ValueError(f"unknown preset {setup_id!r}; valid ids are 1..7") from None


def mbc(scenario, grid=None):
    """Maximal basis coherence of a scenario against its estimation grid.

    The value is the largest absolute cross-correlation between any true
    steering vector and the grid steering vectors, excluding a source's own
    column whenever the source sits exactly on the grid.

    Parameters
    ----------
    scenario : Scenario
    grid : SteeringGrid, optional
        Defaults to the grid implied by the scenario. Must match the
        scenario's sensor count when given.

    Returns
    -------
    float
        Coherence in [0, 1].
    """
    if grid is None:
        grid = build_grid(scenario.grid_spacing_deg, scenario.n_sensors)
    if grid.n_sensors != scenario.n_sensors:
        raise ValueError("grid was built for a different sensor count")
    best = 0.0
    for theta in scenario.doas_deg:
        a = steering_vector(theta, scenario.n_sensors)
        corr = np.abs(grid.matrix.conj().T @ a)
        corr[grid.angles_deg == theta] = 0.0
        best = max(best, float(corr.max()))
    return best


def generate_snapshot(scenario, snr_db, rng, grid=None):
    """Draw one noisy array snapshot for a scenario.

    Source phases are uniform on [0, 2*pi); the additive noise is circular
    complex Gaussian with variance ``sigma^2`` chosen so that
    ``snr_db = 10*log10(sigma_s^2 / sigma^2)`` where ``sigma_s^2`` is the
    average source power. ``snr_db = inf`` yields a noiseless snapshot. The
    snapshot always uses the exact (possibly off-grid) source angles.

    Parameters
    ----------
    scenario : Scenario
    snr_db : float
        Signal-to-noise ratio in dB; ``math.inf`` disables noise.
    rng : numpy.random.Generator
        Exclusively owned random stream; the draw order is fixed so equal
        seeds give bit-identical snapshots.
    grid : SteeringGrid, optional
        Reused when supplied, rebuilt from the scenario otherwise.

    Returns
    -------
    (y, support, amplitudes)
        ``y`` is the length-n snapshot, ``support`` the tuple of grid
        indices nearest to the true angles (ascending) and ``amplitudes``
        the complex source amplitudes ordered to match ``support``.
    """
    if grid is None:
        grid = build_grid(scenario.grid_spacing_deg, scenario.n_sensors)
    if not (math.isfinite(snr_db) or snr_db == math.inf):
        raise ValueError("snr_db must be finite or +inf")

    k = scenario.k
    mags = np.asarray(scenario.magnitudes, dtype=float)
    phases = rng.uniform(0.0, 2.0 * np.pi, size=k)
    s = mags * np.exp(1j * phases)

    columns = np.column_stack(
        [steering_vector(t, scenario.n_sensors) for t in scenario.doas_deg]
    )
    y = columns @ s

    sigma_s2 = float(np.mean(mags**2))
    sigma2 = 0.0 if snr_db == math.inf else sigma_s2 * 10.0 ** (-snr_db / 10.0)
    scale = math.sqrt(sigma2 / 2.0)
    noise = rng.standard_normal(scenario.n_sensors) + 1j * rng.standard_normal(
        scenario.n_sensors
    )
    y = y + scale * noise

    support = np.array([grid.nearest_index(t) for t in scenario.doas_deg])
    if len(set(support.tolist())) != k:
        raise ValueError("two sources map to the same grid index")
    order = np.argsort(support)
    return as_vector(y, "snapshot"), tuple(int(i) for i in support[order]), s[order]
