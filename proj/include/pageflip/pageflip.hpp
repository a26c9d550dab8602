#pragma once

// Everything except image file I/O (which needs libpng) and the CLI.
#include "pageflip/config.hpp"
#include "pageflip/device.hpp"
#include "pageflip/error.hpp"
#include "pageflip/evaluate.hpp"
#include "pageflip/filter.hpp"
#include "pageflip/image.hpp"
#include "pageflip/layout.hpp"
#include "pageflip/layout_io.hpp"
#include "pageflip/policy.hpp"
#include "pageflip/session.hpp"
#include "pageflip/simulate.hpp"
#include "pageflip/trace.hpp"
