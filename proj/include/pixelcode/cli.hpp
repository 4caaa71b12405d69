// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The pixelcode Authors

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pixelcode {

// Exit codes: 0 success, 1 usage/config/validation error, 2 runtime failure.
int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int cli_main(int argc, char** argv);

}  // namespace pixelcode
