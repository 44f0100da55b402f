"""Two-port acoustic resonator response from cascaded transfer matrices.

The device is a pair of interdigital transducers (IDTs) between two
reflection gratings. Each element is a transfer matrix acting on the
right- and left-travelling wave amplitudes (W+, W-) at its reference
planes, with the convention

    W_left = [element] @ W_right

so the full device is the literal left-to-right product

    M = G_in @ D_in @ T_in @ D_mid @ T_out @ D_out @ G_out

of grating (G), spacing (D) and IDT (T, acoustic sub-block) matrices. The
driven IDT additionally injects a coupling column into the cascade; solving
with no acoustic input from outside the gratings and the output IDT
electrically idle yields the electrical transmission coefficient S21.

Conventions: time factor exp(+i omega t), forward propagation phase
exp(-i beta x). A grating strip sits every half wavelength, so a grating
with N strips spans N * wavelength / 2 and has distributed reflectivity
kappa = 2 |r_s| / wavelength. At the Bragg frequency the grating reflects
with phase +90 deg (for zero strip reflection phase), which places the
standing-wave antinodes on the IDT fingers when the grating-to-IDT gap is
(1/8 + n/2) wavelengths; that gap maximizes the resonant peak.

IDT internal mechanical reflections are neglected (transversal model):
transduction launches waves from the IDT center with a sin(x)/x array
factor over the finger pairs, the launch amplitude is capped by the power
the electrical port actually accepts (|mu|^2 = (1 - |reflection|^2) / 2),
and the acoustic through-path is propagation scaled by sqrt(1 - |mu|^2),
the energy the electrical tap removes per pass. This keeps |S21| <= 1
throughout the model's weak-coupling validity envelope (reflector
strength N |r_s| up to about 1, launch coupling |mu| well below 1); a
no-regeneration IDT cannot be exactly passive for arbitrarily strong
cavities, so far outside that envelope second-order leakage can appear.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field, replace
import numpy as np

from .fpw_dispersion import LoadingState, loaded_velocity
from .plate_materials import CompositePlate

# 2x2 acoustic and 3x3 mixed (acoustic + electrical) transfer matrices are
# plain complex ndarrays; shapes are (2, 2) and (3, 3).
TransmissionMatrix2 = np.ndarray
MixedMatrix3 = np.ndarray

# Electrical reference admittance of the measurement ports (1/50 ohm).
PORT_ADMITTANCE = 0.02

DEFAULT_STRIP_REFLECTIVITY = 0.02
DEFAULT_TRANSDUCTION = 0.4
DEFAULT_CAPACITANCE_PER_PAIR = 1.0e-12
DEFAULT_SWEEP_POINTS = 2001
DEFAULT_SWEEP_SPAN = 0.1  # sweep f0 * [1 - span, 1 + span]

# Aperture (in wavelengths) at which the transduction normalization is 1.
REFERENCE_OVERLAP = 50.0


class NoResonanceError(ValueError):
    """The frequency response has no usable interior peak."""


@dataclass(frozen=True)
class DeviceGeometry:
    """Layout of the two-port resonator.

    wavelength and grating_gap in m; overlap and idt_separation in
    multiples of the wavelength. ``grating_strips = 0`` removes the
    gratings entirely (delay-line configuration). ``grating_gap`` is the
    spacing between each grating and its adjacent IDT, applied on both
    sides.
    """

    wavelength: float
    idt_pairs: int = 20
    grating_strips: int = 40
    overlap: float = 50.0
    idt_separation: float = 10.0
    grating_gap: float = 5.0e-6
    metallization_ratio: float = 0.5

    def __post_init__(self):
        if self.wavelength <= 0:
            raise ValueError("wavelength must be > 0")
        if self.idt_pairs < 1:
            raise ValueError("idt_pairs must be >= 1")
        if self.grating_strips < 0:
            raise ValueError("grating_strips must be >= 0")
        if self.overlap <= 0:
            raise ValueError("overlap must be > 0")
        if self.idt_separation < 0:
            raise ValueError("idt_separation must be >= 0")
        if self.grating_gap < 0:
            raise ValueError("grating_gap must be >= 0")
        if not 0 < self.metallization_ratio < 1:
            raise ValueError("metallization_ratio must lie in (0, 1)")

    @property
    def idt_length(self) -> float:
        """Acoustic length of one IDT (m), one wavelength per finger pair."""
        return self.idt_pairs * self.wavelength

    @property
    def separation_length(self) -> float:
        """Distance between the two IDTs (m)."""
        return self.idt_separation * self.wavelength

    @property
    def grating_length(self) -> float:
        """Length of one grating (m), one strip every half wavelength."""
        return self.grating_strips * self.wavelength / 2.0


@dataclass(frozen=True)
class ComParameters:
    """Coupling-of-modes and electrical parameters of the device.

    free_velocity in m/s; strip_reflectivity is the per-strip reflection
    magnitude |r_s| (reflection_phase carries its phase, radians);
    transduction_strength is the launched acoustic amplitude per unit
    incident voltage wave at the reference aperture; attenuation in Np/m.
    """

    free_velocity: float
    strip_reflectivity: float = DEFAULT_STRIP_REFLECTIVITY
    reflection_phase: float = 0.0
    transduction_strength: complex = DEFAULT_TRANSDUCTION
    static_capacitance_per_pair: float = DEFAULT_CAPACITANCE_PER_PAIR
    attenuation: float = 0.0

    def __post_init__(self):
        if self.free_velocity <= 0:
            raise ValueError("free_velocity must be > 0")
        if not 0 <= self.strip_reflectivity < 0.2:
            raise ValueError("strip_reflectivity magnitude must lie in [0, 0.2)")
        if abs(self.transduction_strength) >= 1.0:
            raise ValueError(
                "normalized transduction_strength magnitude must be < 1"
            )
        if self.static_capacitance_per_pair < 0:
            raise ValueError("static_capacitance_per_pair must be >= 0")
        if self.attenuation < 0:
            raise ValueError("attenuation must be >= 0")

    def center_frequency(self, wavelength: float) -> float:
        """Synchronous frequency v / wavelength (Hz)."""
        return self.free_velocity / wavelength


@dataclass(frozen=True)
class FrequencyResponse:
    """Complex S21 over a strictly increasing frequency grid.

    ``gap_indices`` marks sweep points where the boundary solve was
    singular; their s21 entries are NaN.
    """

    frequencies: np.ndarray
    s21: np.ndarray
    geometry: DeviceGeometry
    parameters: ComParameters
    gap_indices: tuple[int, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if len(self.frequencies) != len(self.s21):
            raise ValueError("frequency and s21 arrays differ in length")
        if len(self.frequencies) == 0:
            raise ValueError("frequency response is empty")
        if np.any(np.diff(self.frequencies) <= 0):
            raise ValueError("frequencies must be strictly increasing")

    def magnitude_db(self) -> np.ndarray:
        """20 log10 |S21| per point (dB)."""
        with np.errstate(divide="ignore", invalid="ignore"):
            return 20.0 * np.log10(np.abs(self.s21))


@dataclass(frozen=True)
class ResonanceSummary:
    """Peak location and shape extracted from a frequency response."""

    peak_frequency: float
    peak_magnitude: float
    insertion_loss_db: float
    bandwidth_3db: float
    quality_factor: float


def design_spacing(index: int, wavelength: float) -> float:
    """Grating-to-IDT gap (1/8 + index/2) * wavelength for a sharp peak (m)."""
    if index < 0 or int(index) != index:
        raise ValueError("spacing index must be a non-negative integer")
    if wavelength <= 0:
        raise ValueError("wavelength must be > 0")
    return (0.125 + 0.5 * index) * wavelength


def spacing_matrix(
    frequency: float, length: float, params: ComParameters
) -> TransmissionMatrix2:
    """Transfer matrix of a bare propagation path of the given length."""
    if length < 0:
        raise ValueError("length must be >= 0")
    if frequency <= 0:
        raise ValueError("frequency must be > 0")
    gamma = params.attenuation + 1j * 2.0 * math.pi * frequency / params.free_velocity
    phase = cmath.exp(gamma * length)
    return np.array([[phase, 0.0], [0.0, 1.0 / phase]], dtype=complex)


def _coupling_per_length(geometry: DeviceGeometry, params: ComParameters) -> complex:
    """Distributed grating reflectivity kappa (1/m), phase included."""
    magnitude = 2.0 * params.strip_reflectivity / geometry.wavelength
    return magnitude * cmath.exp(1j * params.reflection_phase)


def _grating_envelope(
    frequency: float, geometry: DeviceGeometry, params: ComParameters
) -> TransmissionMatrix2:
    """Coupled-mode envelope transfer matrix of one grating (right to left)."""
    length = geometry.grating_length
    kappa = _coupling_per_length(geometry, params)
    beta = 2.0 * math.pi * frequency / params.free_velocity
    bragg = 2.0 * math.pi / geometry.wavelength
    detuning = (beta - bragg) - 1j * params.attenuation

    sigma = cmath.sqrt(kappa * kappa.conjugate() - detuning * detuning)
    if abs(sigma * length) < 1e-9:
        # sinh(x)/x -> 1 limit
        stretch = length * (1.0 + (sigma * length) ** 2 / 6.0)
        spread = 1.0 + (sigma * length) ** 2 / 2.0
    else:
        stretch = cmath.sinh(sigma * length) / sigma
        spread = cmath.cosh(sigma * length)
    return np.array(
        [
            [spread + 1j * detuning * stretch, -1j * kappa * stretch],
            [1j * kappa.conjugate() * stretch, spread - 1j * detuning * stretch],
        ],
        dtype=complex,
    )


def grating_matrix(
    frequency: float, geometry: DeviceGeometry, params: ComParameters
) -> TransmissionMatrix2:
    """Transfer matrix of one reflection grating.

    Hyperbolic (strongly reflective) inside the stopband |beta - beta_0| <
    kappa, oscillatory outside. Zero strips or zero strip reflectivity
    reduce it to plain propagation over the grating length.
    """
    if frequency <= 0:
        raise ValueError("frequency must be > 0")
    if geometry.grating_strips == 0:
        return np.eye(2, dtype=complex)
    envelope = _grating_envelope(frequency, geometry, params)
    carrier = cmath.exp(1j * 2.0 * math.pi / geometry.wavelength * geometry.grating_length)
    return envelope @ np.array([[carrier, 0.0], [0.0, 1.0 / carrier]], dtype=complex)


def grating_scattering(
    frequency: float, geometry: DeviceGeometry, params: ComParameters
) -> tuple[complex, complex]:
    """(reflection, transmission) of one grating for waves incident on it.

    Referenced at the grating face; at the Bragg frequency the lossless
    reflection magnitude is tanh(N |r_s|) with phase +90 deg for zero
    reflection phase.
    """
    g = grating_matrix(frequency, geometry, params)
    return g[1, 0] / g[0, 0], 1.0 / g[0, 0]


def array_factor(frequency: float, center_frequency: float, pairs: int) -> float:
    """Normalized sin(x)/x response of a uniform finger-pair array.

    Unity at the synchronous frequency, first nulls at
    center_frequency * (1 +- 1/pairs).
    """
    x = pairs * math.pi * (frequency - center_frequency) / center_frequency
    return float(np.sinc(x / math.pi))


def _port_coupling(
    frequency: float, geometry: DeviceGeometry, params: ComParameters
) -> tuple[complex, complex]:
    """(launch amplitude mu, electrical reflection) of one IDT port.

    The port sees a radiation conductance |transduction|^2 * Y0 scaled by
    the squared array factor and the aperture, in parallel with the static
    finger capacitance. The power the port accepts, 1 - |reflection|^2,
    radiates acoustically in equal halves, which fixes the launch
    amplitude: |mu|^2 = (1 - |reflection|^2) / 2. This keeps the drive
    passive for any parameter values.
    """
    lobe = array_factor(
        frequency, params.center_frequency(geometry.wavelength),
        geometry.idt_pairs,
    )
    aperture = geometry.overlap / REFERENCE_OVERLAP
    capacitance = (
        params.static_capacitance_per_pair * geometry.idt_pairs * aperture
    )
    susceptance = 2.0 * math.pi * frequency * capacitance
    strength = params.transduction_strength
    if strength == 0 or lobe == 0.0:
        admittance = 1j * susceptance
        reflection = (PORT_ADMITTANCE - admittance) / (PORT_ADMITTANCE + admittance)
        return 0.0, reflection

    conductance = (
        abs(strength) ** 2 * PORT_ADMITTANCE * lobe**2 * aperture
    )
    admittance = conductance + 1j * susceptance
    reflection = (PORT_ADMITTANCE - admittance) / (PORT_ADMITTANCE + admittance)
    magnitude = math.sqrt(max(0.0, 1.0 - abs(reflection) ** 2) / 2.0)
    phase = strength / abs(strength)
    sign = 1.0 if lobe > 0 else -1.0
    return magnitude * sign * phase, reflection


def _tap_transmission(mu: complex) -> float:
    """Through-path amplitude after the electrical tap removes |mu|^2."""
    return math.sqrt(max(1e-12, 1.0 - min(1.0, abs(mu) ** 2)))


def idt_matrix(
    frequency: float, geometry: DeviceGeometry, params: ComParameters
) -> MixedMatrix3:
    """Mixed 3x3 transfer matrix of one IDT.

    Rows/columns are ordered (W+, W-, electrical): the acoustic 2x2
    sub-block is propagation over the IDT length times the tap
    transmission, the third column couples the incident voltage wave into
    center-launched acoustic waves, and the third row is the reciprocal
    acoustic pickup plus the electrical self term. With zero transduction
    the block is exactly the spacing matrix of the IDT length.
    """
    if frequency <= 0:
        raise ValueError("frequency must be > 0")
    length = geometry.idt_length
    gamma = params.attenuation + 1j * 2.0 * math.pi * frequency / params.free_velocity
    full = cmath.exp(gamma * length)
    half = cmath.exp(gamma * length / 2.0)
    mu, gamma_e = _port_coupling(frequency, geometry, params)
    tap = _tap_transmission(mu)
    return np.array(
        [
            [full / tap, 0.0, -mu * half / tap],
            [0.0, tap / full, mu / half],
            [mu * half / tap, mu / half, gamma_e - mu * mu / tap],
        ],
        dtype=complex,
    )


def _acoustic_block(mixed: MixedMatrix3) -> TransmissionMatrix2:
    """Acoustic 2x2 sub-block of a mixed IDT matrix."""
    return np.array(mixed[:2, :2], dtype=complex)


def cascade(
    geometry: DeviceGeometry, params: ComParameters, frequency: float
) -> tuple[TransmissionMatrix2, np.ndarray]:
    """Overall acoustic matrix and input-drive column at one frequency.

    Returns (M, u): M is the product grating * gap * IDT * separation *
    IDT * gap * grating of acoustic blocks, and u is the column the driven
    input IDT injects, already propagated out through its grating side.
    """
    blocks = _element_blocks(geometry, params, frequency)
    g_in, d_in, t_in, d_mid, t_out, d_out, g_out = blocks["chain"]
    pre = g_in @ d_in
    overall = pre @ t_in @ d_mid @ t_out @ d_out @ g_out
    drive = pre @ blocks["tau"]
    return overall, drive


def _element_blocks(geometry, params, frequency):
    """All element matrices of the Figure-style chain at one frequency."""
    gap = spacing_matrix(frequency, geometry.grating_gap, params)
    mid = spacing_matrix(frequency, geometry.separation_length, params)
    grating = grating_matrix(frequency, geometry, params)
    mixed = idt_matrix(frequency, geometry, params)
    t_ac = _acoustic_block(mixed)

    length = geometry.idt_length
    gamma = params.attenuation + 1j * 2.0 * math.pi * frequency / params.free_velocity
    half = cmath.exp(gamma * length / 2.0)
    mu, _ = _port_coupling(frequency, geometry, params)
    tau = np.array([-mu * half / _tap_transmission(mu), mu / half], dtype=complex)
    return {
        "chain": (grating, gap, t_ac, mid, t_ac, gap, grating),
        "tau": tau,
        "mu": mu,
        "pickup_half": 1.0 / half,
    }


def _solve_s21(geometry, params, frequency, drive_port=1):
    """Electrical transmission at one frequency, or None on a singular solve.

    Boundary conditions: no acoustic waves incident from outside either
    grating, and the undriven IDT electrically idle. ``drive_port`` selects
    which IDT is driven (1 = nearer the low-index grating).
    """
    blocks = _element_blocks(geometry, params, frequency)
    g_in, d_in, t_in, d_mid, t_out, d_out, g_out = blocks["chain"]
    tau = blocks["tau"]
    mu = blocks["mu"]
    pickup = blocks["pickup_half"]

    pre = g_in @ d_in
    post = d_out @ g_out
    overall = pre @ t_in @ d_mid @ t_out @ post
    if drive_port == 1:
        drive = pre @ tau
    elif drive_port == 2:
        drive = pre @ t_in @ d_mid @ tau
    else:
        raise ValueError("drive_port must be 1 or 2")

    denom = overall[0, 0]
    if not np.isfinite(denom) or abs(denom) == 0.0:
        return None
    w_right = np.array([-drive[0] / denom, 0.0], dtype=complex)

    # Back-substitute wave amplitudes plane by plane, right to left.
    w6 = g_out @ w_right
    w5 = d_out @ w6
    w4 = t_out @ w5 + (tau if drive_port == 2 else 0.0)
    w3 = d_mid @ w4
    w2 = t_in @ w3 + (tau if drive_port == 1 else 0.0)
    if drive_port == 1:
        out = mu * pickup * (w4[0] + w5[1])
    else:
        out = mu * pickup * (w2[0] + w3[1])
    if not np.isfinite(out):
        return None
    return complex(out)


def default_sweep_bounds(center_frequency: float) -> tuple[float, float]:
    """Standard sweep window around the synchronous frequency."""
    return (
        center_frequency * (1.0 - DEFAULT_SWEEP_SPAN),
        center_frequency * (1.0 + DEFAULT_SWEEP_SPAN),
    )


def s21_sweep(
    geometry: DeviceGeometry,
    params: ComParameters,
    f_start: float | None = None,
    f_stop: float | None = None,
    points: int = DEFAULT_SWEEP_POINTS,
    drive_port: int = 1,
) -> FrequencyResponse:
    """Electrical S21 over a uniform frequency grid.

    Defaults to the +-10% window around the synchronous frequency.
    Frequencies where the boundary solve is singular are recorded as NaN
    gaps and the sweep continues.
    """
    if points < 2:
        raise ValueError("points must be >= 2")
    f0 = params.center_frequency(geometry.wavelength)
    if f_start is None or f_stop is None:
        lo, hi = default_sweep_bounds(f0)
        f_start = lo if f_start is None else f_start
        f_stop = hi if f_stop is None else f_stop
    if not 0 < f_start < f_stop:
        raise ValueError("need 0 < f_start < f_stop")

    frequencies = np.linspace(f_start, f_stop, points)
    s21 = np.empty(points, dtype=complex)
    gaps: list[int] = []
    for i, f in enumerate(frequencies):
        value = _solve_s21(geometry, params, float(f), drive_port=drive_port)
        if value is None:
            s21[i] = complex(float("nan"), float("nan"))
            gaps.append(i)
        else:
            s21[i] = value
    return FrequencyResponse(
        frequencies=frequencies,
        s21=s21,
        geometry=geometry,
        parameters=params,
        gap_indices=tuple(gaps),
    )


def _crossing(freqs, mags, i_from, i_to, target):
    """Linear interpolation of the frequency where |S21| crosses target."""
    f1, f2 = freqs[i_from], freqs[i_to]
    m1, m2 = mags[i_from], mags[i_to]
    if m2 == m1:
        return f2
    return f1 + (target - m1) * (f2 - f1) / (m2 - m1)


def find_resonance(response: FrequencyResponse) -> ResonanceSummary:
    """Locate the global |S21| peak and its -3 dB bandwidth.

    Raises NoResonanceError for flat responses, for peaks sitting on the
    sweep boundary (monotone responses), and when a -3 dB crossing is not
    bracketed inside the sweep.
    """
    mags = np.abs(response.s21)
    valid = np.isfinite(mags)
    if not np.any(valid):
        raise NoResonanceError("response contains no finite points")
    mags = np.where(valid, mags, -np.inf)
    peak = int(np.argmax(mags))
    peak_mag = float(mags[peak])
    finite = mags[np.isfinite(mags)]
    if peak_mag <= 0 or float(np.min(finite)) == peak_mag:
        raise NoResonanceError("response is flat; no resonance to extract")
    if peak == 0 or peak == len(mags) - 1:
        raise NoResonanceError("|S21| maximum sits on the sweep boundary")

    target = peak_mag / math.sqrt(2.0)
    freqs = response.frequencies
    left = None
    for i in range(peak - 1, -1, -1):
        if mags[i] <= target:
            left = _crossing(freqs, mags, i, i + 1, target)
            break
    right = None
    for i in range(peak + 1, len(mags)):
        if mags[i] <= target:
            right = _crossing(freqs, mags, i, i - 1, target)
            break
    if left is None or right is None:
        raise NoResonanceError("-3 dB bandwidth is not bracketed by the sweep")

    bandwidth = float(right - left)
    peak_frequency = float(freqs[peak])
    return ResonanceSummary(
        peak_frequency=peak_frequency,
        peak_magnitude=peak_mag,
        insertion_loss_db=20.0 * math.log10(peak_mag),
        bandwidth_3db=bandwidth,
        quality_factor=peak_frequency / bandwidth,
    )


def write_sweep_csv(response: FrequencyResponse, path) -> None:
    """Export a sweep as CSV: ``f_hz,s21_re,s21_im,s21_db``, one row per
    point, %.9e formatting. Byte-stable for identical inputs."""
    db = response.magnitude_db()
    with open(path, "w", newline="") as handle:
        handle.write("f_hz,s21_re,s21_im,s21_db\n")
        for f, s, mag_db in zip(response.frequencies, response.s21, db):
            handle.write(
                "%.9e,%.9e,%.9e,%.9e\n" % (f, s.real, s.imag, mag_db)
            )


def fpw_device_response(
    plate: CompositePlate,
    loading: LoadingState,
    geometry: DeviceGeometry,
    params: ComParameters,
    f_start: float | None = None,
    f_stop: float | None = None,
    points: int = DEFAULT_SWEEP_POINTS,
    include_viscous_loss: bool = False,
) -> FrequencyResponse:
    """Resonator sweep using the flexural-plate-wave velocity of the membrane.

    The plate-and-loading phase velocity replaces the free velocity (the
    response is evaluated at the design wavelength, dispersion across the
    sweep neglected). With ``include_viscous_loss`` the viscous entrained
    mass also adds a propagation loss term.
    """
    solution = loaded_velocity(plate, loading, geometry.wavelength)
    attenuation = params.attenuation
    if include_viscous_loss and solution.viscous_mass > 0.0:
        liquid = loading.liquid
        total_mass = (
            plate.mass_per_area
            + liquid.density * solution.evanescent_length
            + solution.viscous_mass
        )
        wavenumber = 2.0 * math.pi / geometry.wavelength
        attenuation = attenuation + wavenumber * solution.viscous_mass / (
            2.0 * total_mass
        )
    updated = replace(
        params, free_velocity=solution.phase_velocity, attenuation=attenuation
    )
    return s21_sweep(geometry, updated, f_start, f_stop, points)
