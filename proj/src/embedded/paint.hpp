#pragma once

#include "embedded/layout.hpp"
#include "uigym/image.hpp"

namespace uigym::embedded {

/// Rasterizes the laid-out page into a viewport-sized frame at the given
/// scroll offset. Deterministic: same layout and offset, same pixels.
Image paint_page(const LayoutResult& layout, int viewport_width,
                 int viewport_height, double scroll_x = 0, double scroll_y = 0);

}  // namespace uigym::embedded
