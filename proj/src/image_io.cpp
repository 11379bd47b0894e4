#include "nimbus/image_io.hpp"

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include <fmt/format.h>

#include "nimbus/error.hpp"

namespace nimbus {

SkyImage read_image(const std::filesystem::path& path, Timestamp timestamp) {
  const cv::Mat bgr = cv::imread(path.string(), cv::IMREAD_COLOR);
  if (bgr.empty()) throw InputError("ingest", fmt::format("cannot decode image {}", path.string()));

  std::vector<Rgb> pixels;
  pixels.reserve(static_cast<std::size_t>(bgr.rows) * static_cast<std::size_t>(bgr.cols));
  for (int y = 0; y < bgr.rows; ++y) {
    const auto* row = bgr.ptr<cv::Vec3b>(y);
    for (int x = 0; x < bgr.cols; ++x) pixels.push_back({row[x][2], row[x][1], row[x][0]});
  }
  return SkyImage{timestamp, bgr.cols, bgr.rows, std::move(pixels)};
}

void write_png(const std::filesystem::path& path, const SkyImage& image) {
  cv::Mat bgr(image.height(), image.width(), CV_8UC3);
  for (int y = 0; y < image.height(); ++y) {
    auto* row = bgr.ptr<cv::Vec3b>(y);
    for (int x = 0; x < image.width(); ++x) {
      const Rgb& p = image.at(x, y);
      row[x] = cv::Vec3b{p.b, p.g, p.r};
    }
  }
  // Encode next to the target, then rename into place.
  const auto tmp = path.parent_path() / (".tmp-" + path.filename().string());
  if (!cv::imwrite(tmp.string(), bgr)) {
    throw InputError("ingest", fmt::format("cannot write image {}", path.string()));
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace nimbus
