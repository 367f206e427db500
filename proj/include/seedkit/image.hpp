#pragma once

#include <string>

#include "seedkit/types.hpp"

namespace seedkit {

/// Decodes an 8-bit RGB PNG. No resizing or color conversion is performed:
/// grayscale, palette, alpha and 16-bit files are rejected.
ImagePixels load_image(const std::string& path);

void write_png(const std::string& path, const ImagePixels& img);

}  // namespace seedkit
