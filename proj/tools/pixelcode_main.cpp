// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The pixelcode Authors

#include "pixelcode/cli.hpp"

int main(int argc, char** argv) { return pixelcode::cli_main(argc, argv); }
