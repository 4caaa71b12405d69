# SPDX-License-Identifier: Apache-2.0
# Copyright (C) 2026 The pixelcode Authors
"""Antenna coding for pixel antennas."""

from ._core import (
    Error,
    PixelAntennaModel,
    UsageError,
    __version__,
    capacity_uniform,
    capacity_waterfilling,
    cli,
    codebook_coders,
    codebook_correlation,
    exhaustive_maximize,
    isotropic_pattern,
    load_model,
    mimo_channel,
    optimize_siso_gain,
    pattern_svd,
    port_currents,
    radiation_pattern,
    read_model_file,
    run_experiment,
    sample_virtual_channel,
    save_model,
    sebo_maximize,
    siso_channel,
    synthesize_model,
    train_codebook,
    validate_model,
    waterfill,
    write_model_file,
)

__all__ = [name for name in dir() if not name.startswith("_")]
