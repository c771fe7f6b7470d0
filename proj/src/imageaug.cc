// Copyright 2026 The ttscale Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ttscale/imageaug.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "image_internal.h"
#include "ttscale/random.h"

namespace ttscale {
namespace {

using Params = std::vector<NamedRange>;

TransformSpec Spec(std::string name, Params params, double p = kDefaultApplyProb) {
  return TransformSpec{std::move(name), std::move(params), p};
}

ParamRange Sym(double limit) { return {-limit, limit}; }
ParamRange Fixed(double v) { return {v, v}; }

std::vector<TransformSpec> HighCatalog() {
  return {
      Spec("brightness_contrast", {{"brightness", Sym(0.2)}, {"contrast", Sym(0.2)}}, 0.6),
      Spec("safe_rotate", {{"angle", Sym(20)}}, 0.6),
      Spec("gaussian_blur", {{"ksize", {3, 7}}}, 0.6),
      Spec("clahe", {{"clip_limit", {1, 4}}}, 0.5),
      Spec("random_gamma", {{"gamma", {80, 120}}}, 0.6),
      Spec("hue_saturation_value",
           {{"hue", Sym(20)}, {"saturation", Sym(30)}, {"value", Sym(20)}}, 0.6),
      Spec("random_scale", {{"scale", {0.9, 1.1}}}, 0.6),
      Spec("rgb_shift", {{"r", Sym(20)}, {"g", Sym(20)}, {"b", Sym(20)}}, 0.6),
      Spec("median_blur", {{"ksize", {3, 3}}}, 0.6),
      Spec("image_compression", {{"quality", {85, 95}}}, 0.45),
      Spec("sharpen", {{"alpha", {0.2, 0.5}}, {"lightness", {0.5, 1.0}}}, 0.6),
      Spec("planckian_jitter", {{"temperature", {3000, 15000}}}),
      Spec("random_fog", {{"fog_coef", {0.3, 1.0}}, {"alpha_coef", Fixed(0.15)}}),
      Spec("random_tone_curve", {{"scale", Fixed(0.1)}}),
      Spec("emboss", {{"alpha", {0.2, 0.5}}, {"strength", {0.2, 0.7}}}),
      Spec("grid_distortion", {{"num_steps", Fixed(5)}, {"distort", Sym(0.3)}}),
      Spec("perspective", {{"scale", {0.0, 0.05}}}),
      Spec("grid_dropout", {{"ratio", Fixed(0.25)}}, 0.66),
      Spec("coarse_dropout", {{"holes", {1, 2}}, {"hole_fraction", {0.1, 0.2}}}, 0.7),
  };
}

std::vector<TransformSpec> MediumCatalog() {
  return {
      Spec("brightness_contrast", {{"brightness", Sym(0.2)}, {"contrast", Sym(0.2)}}),
      Spec("safe_rotate", {{"angle", Sym(15)}}),
      Spec("gaussian_blur", {{"ksize", {3, 7}}}, 0.5),
      Spec("clahe", {{"clip_limit", {1, 3}}}, 0.4),
      Spec("random_gamma", {{"gamma", {80, 120}}}, 0.5),
      Spec("hue_saturation_value",
           {{"hue", Sym(15)}, {"saturation", Sym(15)}, {"value", Sym(15)}}, 0.5),
      Spec("random_scale", {{"scale", {0.92, 1.08}}}, 0.5),
      Spec("rgb_shift", {{"r", Sym(15)}, {"g", Sym(15)}, {"b", Sym(15)}}),
      Spec("median_blur", {{"ksize", {3, 3}}}, 0.5),
      Spec("image_compression", {{"quality", {85, 95}}}, 0.35),
      Spec("sharpen", {{"alpha", {0.2, 0.5}}, {"lightness", {0.6, 1.0}}}, 0.5),
      Spec("planckian_jitter", {{"temperature", {3000, 15000}}}, 0.5),
      Spec("random_fog", {{"fog_coef", {0.3, 1.0}}, {"alpha_coef", Fixed(0.1)}}, 0.3),
      Spec("random_tone_curve", {{"scale", Fixed(0.2)}}, 0.5),
      Spec("emboss", {{"alpha", {0.2, 0.5}}, {"strength", {0.5, 0.7}}}, 0.5),
      Spec("grid_distortion", {{"num_steps", Fixed(5)}, {"distort", Sym(0.2)}}, 0.5),
      Spec("perspective", {{"scale", {0.0, 0.03}}}, 0.5),
      Spec("grid_dropout", {{"ratio", Fixed(0.25)}}, 0.6),
      Spec("coarse_dropout", {{"holes", {1, 2}}, {"hole_fraction", {0.1, 0.2}}}, 0.5),
  };
}

std::vector<TransformSpec> LowCatalog() {
  return {
      Spec("brightness_contrast", {{"brightness", Sym(0.1)}, {"contrast", Sym(0.1)}}, 0.3),
      Spec("safe_rotate", {{"angle", Sym(10)}}, 0.3),
      Spec("gaussian_blur", {{"ksize", {3, 5}}}, 0.3),
      Spec("clahe", {{"clip_limit", {1, 2}}}, 0.3),
      Spec("random_gamma", {{"gamma", {90, 110}}}, 0.3),
      Spec("hue_saturation_value",
           {{"hue", Sym(10)}, {"saturation", Sym(10)}, {"value", Sym(10)}}, 0.3),
      Spec("random_scale", {{"scale", {0.95, 1.05}}}, 0.3),
      Spec("rgb_shift", {{"r", Sym(10)}, {"g", Sym(10)}, {"b", Sym(10)}}, 0.3),
      Spec("median_blur", {{"ksize", {3, 3}}}, 0.3),
      Spec("image_compression", {{"quality", {85, 95}}}, 0.25),
      Spec("sharpen", {{"alpha", {0.1, 0.3}}, {"lightness", {0.7, 1.0}}}, 0.3),
      Spec("planckian_jitter", {{"temperature", {3000, 15000}}}, 0.3),
      Spec("random_fog", {{"fog_coef", {0.3, 1.0}}, {"alpha_coef", Fixed(0.05)}}, 0.2),
      Spec("random_tone_curve", {{"scale", Fixed(0.1)}}, 0.3),
      Spec("emboss", {{"alpha", {0.1, 0.3}}, {"strength", {0.3, 0.5}}}, 0.3),
      Spec("grid_distortion", {{"num_steps", Fixed(5)}, {"distort", Sym(0.1)}}, 0.3),
      Spec("perspective", {{"scale", {0.0, 0.02}}}, 0.3),
  };
}

const cv::Scalar kFill(kFillValue, kFillValue, kFillValue);

double Draw(SeededRng& rng, const ParamRange& r) {
  return r.lo == r.hi ? r.lo : rng.Uniform(r.lo, r.hi);
}

int DrawOdd(SeededRng& rng, const ParamRange& r) {
  std::vector<int> odd;
  for (int k = static_cast<int>(r.lo); k <= static_cast<int>(r.hi); ++k) {
    if (k % 2 == 1) odd.push_back(k);
  }
  return odd[rng.Index(odd.size())];
}

cv::Mat ApplyLut(const cv::Mat& src, const std::vector<std::uint8_t>& table) {
  cv::Mat lut(1, 256, CV_8U, const_cast<std::uint8_t*>(table.data()));
  cv::Mat out;
  cv::LUT(src, lut, out);
  return out;
}

std::uint8_t Clamp255(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

cv::Mat Kernel3(const double k[9]) {
  cv::Mat m(3, 3, CV_64F);
  for (int i = 0; i < 9; ++i) m.at<double>(i / 3, i % 3) = k[i];
  return m;
}

// Blend between the identity kernel and `effect` by alpha.
cv::Mat BlendKernel(const double effect[9], double alpha) {
  double k[9];
  for (int i = 0; i < 9; ++i) k[i] = alpha * effect[i] + (i == 4 ? 1.0 - alpha : 0.0);
  return Kernel3(k);
}

// Approximate sRGB of a black body at `kelvin`, each channel in [0, 255].
cv::Vec3d BlackBodyRgb(double kelvin) {
  const double t = kelvin / 100.0;
  double r, g, b;
  if (t <= 66.0) {
    r = 255.0;
    g = 99.4708025861 * std::log(t) - 161.1195681661;
  } else {
    r = 329.698727446 * std::pow(t - 60.0, -0.1332047592);
    g = 288.1221695283 * std::pow(t - 60.0, -0.0755148492);
  }
  if (t >= 66.0) {
    b = 255.0;
  } else if (t <= 19.0) {
    b = 0.0;
  } else {
    b = 138.5177312231 * std::log(t - 10.0) - 305.0447927307;
  }
  return {std::clamp(r, 0.0, 255.0), std::clamp(g, 0.0, 255.0),
          std::clamp(b, 0.0, 255.0)};
}

using TransformFn =
    std::function<cv::Mat(const cv::Mat&, const TransformSpec&, SeededRng&)>;

cv::Mat BrightnessContrast(const cv::Mat& img, const TransformSpec& s,
                           SeededRng& rng) {
  const double alpha = 1.0 + Draw(rng, s.param("contrast"));
  const double beta = 255.0 * Draw(rng, s.param("brightness"));
  cv::Mat out;
  img.convertTo(out, -1, alpha, beta);
  return out;
}

cv::Mat SafeRotate(const cv::Mat& img, const TransformSpec& s, SeededRng& rng) {
  const double angle = Draw(rng, s.param("angle"));
  const double rad = angle * CV_PI / 180.0;
  const double w = img.cols, h = img.rows;
  const double bw = h * std::abs(std::sin(rad)) + w * std::abs(std::cos(rad));
  const double bh = h * std::abs(std::cos(rad)) + w * std::abs(std::sin(rad));
  const double scale = std::min(w / bw, h / bh);
  const cv::Mat m = cv::getRotationMatrix2D(
      cv::Point2f(static_cast<float>(w / 2), static_cast<float>(h / 2)), angle, scale);
  cv::Mat out;
  cv::warpAffine(img, out, m, img.size(), cv::INTER_LINEAR, cv::BORDER_CONSTANT, kFill);
  return out;
}

cv::Mat GaussianBlur(const cv::Mat& img, const TransformSpec& s, SeededRng& rng) {
  const int k = DrawOdd(rng, s.param("ksize"));
  cv::Mat out;
  cv::GaussianBlur(img, out, cv::Size(k, k), 0);
  return out;
}

cv::Mat Clahe(const cv::Mat& img, const TransformSpec& s, SeededRng& rng) {
  const double clip = Draw(rng, s.param("clip_limit"));
  cv::Mat lab;
  cv::cvtColor(img, lab, cv::COLOR_RGB2Lab);
  std::vector<cv::Mat> ch;
  cv::split(lab, ch);
  cv::createCLAHE(clip, cv::Size(8, 8))->apply(ch[0], ch[0]);
  cv::merge(ch, lab);
  cv::Mat out;
  cv::cvtColor(lab, out, cv::COLOR_Lab2RGB);
  return out;
}

cv::Mat RandomGamma(const cv::Mat& img, const TransformSpec& s, SeededRng& rng) {
  const double gamma = Draw(rng, s.param("gamma")) / 100.0;
  std::vector<std::uint8_t> table(256);
  for (int i = 0; i < 256; ++i) table[i] = Clamp255(255.0 * std::pow(i / 255.0, gamma));
  return ApplyLut(img, table);
}

cv::Mat HueSaturationValue(const cv::Mat& img, const TransformSpec& s,
                           SeededRng& rng) {
  const long hue = std::lround(Draw(rng, s.param("hue")));
  const long sat = std::lround(Draw(rng, s.param("saturation")));
  const long val = std::lround(Draw(rng, s.param("value")));
  cv::Mat hsv;
  cv::cvtColor(img, hsv, cv::COLOR_RGB2HSV);
  std::vector<cv::Mat> ch;
  cv::split(hsv, ch);
  std::vector<std::uint8_t> h(256), sv(256), vv(256);
  for (int i = 0; i < 256; ++i) {
    h[i] = static_cast<std::uint8_t>(((i + hue) % 180 + 180) % 180);
    sv[i] = Clamp255(i + sat);
    vv[i] = Clamp255(i + val);
  }
  ch[0] = ApplyLut(ch[0], h);
  ch[1] = ApplyLut(ch[1], sv);
  ch[2] = ApplyLut(ch[2], vv);
  cv::merge(ch, hsv);
  cv::Mat out;
  cv::cvtColor(hsv, out, cv::COLOR_HSV2RGB);
  return out;
}

cv::Mat RandomScale(const cv::Mat& img, const TransformSpec& s, SeededRng& rng) {
  const double f = Draw(rng, s.param("scale"));
  const int h = std::max(1, static_cast<int>(std::lround(img.rows * f)));
  const int w = std::max(1, static_cast<int>(std::lround(img.cols * f)));
  cv::Mat out;
  cv::resize(img, out, cv::Size(w, h), 0, 0, cv::INTER_LINEAR);
  return out;
}

cv::Mat RgbShift(const cv::Mat& img, const TransformSpec& s, SeededRng& rng) {
  const double r = Draw(rng, s.param("r"));
  const double g = Draw(rng, s.param("g"));
  const double b = Draw(rng, s.param("b"));
  cv::Mat out;
  cv::add(img, cv::Scalar(r, g, b), out, cv::noArray(), CV_8UC3);
  return out;
}

cv::Mat MedianBlur(const cv::Mat& img, const TransformSpec& s, SeededRng& rng) {
  const int k = DrawOdd(rng, s.param("ksize"));
  cv::Mat out;
  cv::medianBlur(img, out, k);
  return out;
}

cv::Mat ImageCompression(const cv::Mat& img, const TransformSpec& s,
                         SeededRng& rng) {
  const ParamRange& q = s.param("quality");
  const int quality = rng.UniformInt(static_cast<int>(q.lo), static_cast<int>(q.hi));
  cv::Mat bgr;
  cv::cvtColor(img, bgr, cv::COLOR_RGB2BGR);
  std::vector<std::uint8_t> jpeg;
  cv::imencode(".jpg", bgr, jpeg, {cv::IMWRITE_JPEG_QUALITY, quality});
  cv::Mat decoded = cv::imdecode(jpeg, cv::IMREAD_COLOR);
  cv::Mat out;
  cv::cvtColor(decoded, out, cv::COLOR_BGR2RGB);
  return out;
}

cv::Mat Sharpen(const cv::Mat& img, const TransformSpec& s, SeededRng& rng) {
  const double alpha = Draw(rng, s.param("alpha"));
  const double lightness = Draw(rng, s.param("lightness"));
  const double effect[9] = {-1, -1, -1, -1, 8 + lightness, -1, -1, -1, -1};
  cv::Mat out;
  cv::filter2D(img, out, -1, BlendKernel(effect, alpha));
  return out;
}

cv::Mat Emboss(const cv::Mat& img, const TransformSpec& s, SeededRng& rng) {
  const double alpha = Draw(rng, s.param("alpha"));
  const double st = Draw(rng, s.param("strength"));
  const double effect[9] = {-1 - st, -st, 0, -st, 1, st, 0, st, 1 + st};
  cv::Mat out;
  cv::filter2D(img, out, -1, BlendKernel(effect, alpha));
  return out;
}

cv::Mat PlanckianJitter(const cv::Mat& img, const TransformSpec& s,
                        SeededRng& rng) {
  const cv::Vec3d rgb = BlackBodyRgb(Draw(rng, s.param("temperature")));
  const double g = std::max(rgb[1], 1.0);
  cv::Mat out;
  cv::multiply(img, cv::Scalar(rgb[0] / g, 1.0, rgb[2] / g), out, 1.0, CV_8UC3);
  return out;
}

cv::Mat RandomFog(const cv::Mat& img, const TransformSpec& s, SeededRng& rng) {
  const double fog = Draw(rng, s.param("fog_coef"));
  const double alpha = Draw(rng, s.param("alpha_coef")) * fog;
  const int hw = std::max(static_cast<int>(img.cols / 3 * fog), 10);
  const int radius = std::max(hw / 2, 1);
  const int puffs = rng.UniformInt(8, 16);
  cv::Mat out = img.clone();
  for (int i = 0; i < puffs; ++i) {
    const int x = static_cast<int>(img.cols / 2 + rng.Uniform(-img.cols / 3.0, img.cols / 3.0));
    const int y = static_cast<int>(img.rows / 2 + rng.Uniform(-img.rows / 3.0, img.rows / 3.0));
    cv::Mat layer = out.clone();
    cv::circle(layer, cv::Point(x, y), radius, cv::Scalar(255, 255, 255), cv::FILLED);
    cv::addWeighted(layer, alpha, out, 1.0 - alpha, 0.0, out);
  }
  const int k = std::max(3, (hw / 10) | 1);
  cv::GaussianBlur(out, out, cv::Size(k, k), 0);
  return out;
}

cv::Mat RandomToneCurve(const cv::Mat& img, const TransformSpec& s,
                        SeededRng& rng) {
  const double scale = Draw(rng, s.param("scale"));
  const double low = std::clamp(rng.Normal(0.25, scale), 0.0, 1.0);
  const double high = std::clamp(rng.Normal(0.75, scale), 0.0, 1.0);
  std::vector<std::uint8_t> table(256);
  for (int i = 0; i < 256; ++i) {
    const double t = i / 255.0;
    const double y = 3 * t * (1 - t) * (1 - t) * low + 3 * t * t * (1 - t) * high +
                     t * t * t;
    table[i] = Clamp255(255.0 * y);
  }
  return ApplyLut(img, table);
}

// Piecewise-linear coordinate map with per-cell stretch factors.
cv::Mat DistortedAxis(int size, int steps, const std::vector<double>& stretch) {
  cv::Mat axis(1, size, CV_32F);
  const int step = std::max(1, size / steps);
  double prev = 0.0;
  for (int idx = 0; idx <= steps; ++idx) {
    const int start = idx * step;
    if (start >= size) break;
    const int end = (idx == steps) ? size : std::min(start + step, size);
    const double cur = prev + step * stretch[static_cast<size_t>(idx)];
    const int n = end - start;
    for (int k = 0; k < n; ++k) {
      const double t = n == 1 ? 0.0 : static_cast<double>(k) / (n - 1);
      axis.at<float>(0, start + k) = static_cast<float>(prev + t * (cur - prev));
    }
    prev = cur;
  }
  return axis;
}

cv::Mat GridDistortion(const cv::Mat& img, const TransformSpec& s,
                       SeededRng& rng) {
  const int steps = static_cast<int>(s.param("num_steps").lo);
  const ParamRange& d = s.param("distort");
  std::vector<double> xs, ys;
  for (int i = 0; i <= steps; ++i) xs.push_back(1.0 + Draw(rng, d));
  for (int i = 0; i <= steps; ++i) ys.push_back(1.0 + Draw(rng, d));
  const cv::Mat ax = DistortedAxis(img.cols, steps, xs);
  const cv::Mat ay = DistortedAxis(img.rows, steps, ys);
  cv::Mat map_x(img.size(), CV_32F), map_y(img.size(), CV_32F);
  for (int y = 0; y < img.rows; ++y) {
    for (int x = 0; x < img.cols; ++x) {
      map_x.at<float>(y, x) = ax.at<float>(0, x);
      map_y.at<float>(y, x) = ay.at<float>(0, y);
    }
  }
  cv::Mat out;
  cv::remap(img, out, map_x, map_y, cv::INTER_LINEAR, cv::BORDER_REFLECT_101);
  return out;
}

cv::Mat Perspective(const cv::Mat& img, const TransformSpec& s, SeededRng& rng) {
  const double sigma = Draw(rng, s.param("scale"));
  const float w = static_cast<float>(img.cols), h = static_cast<float>(img.rows);
  const std::vector<cv::Point2f> src{{0, 0}, {w - 1, 0}, {w - 1, h - 1}, {0, h - 1}};
  std::vector<cv::Point2f> dst;
  for (const cv::Point2f& p : src) {
    dst.emplace_back(p.x + static_cast<float>(rng.Normal(0.0, sigma) * w),
                     p.y + static_cast<float>(rng.Normal(0.0, sigma) * h));
  }
  // Fit the output canvas to the warped corners.
  float min_x = dst[0].x, min_y = dst[0].y, max_x = dst[0].x, max_y = dst[0].y;
  for (const cv::Point2f& p : dst) {
    min_x = std::min(min_x, p.x);
    min_y = std::min(min_y, p.y);
    max_x = std::max(max_x, p.x);
    max_y = std::max(max_y, p.y);
  }
  for (cv::Point2f& p : dst) p -= cv::Point2f(min_x, min_y);
  const int out_w = std::max(1, static_cast<int>(std::lround(max_x - min_x + 1)));
  const int out_h = std::max(1, static_cast<int>(std::lround(max_y - min_y + 1)));
  const cv::Mat m = cv::getPerspectiveTransform(src, dst);
  cv::Mat out;
  cv::warpPerspective(img, out, m, cv::Size(out_w, out_h), cv::INTER_LINEAR,
                      cv::BORDER_CONSTANT, kFill);
  return out;
}

cv::Mat GridDropout(const cv::Mat& img, const TransformSpec& s, SeededRng& rng) {
  const double ratio = s.param("ratio").lo;
  const int unit_w = std::max(2, img.cols / 10);
  const int unit_h = std::max(2, img.rows / 10);
  const int hole_w = std::max(1, static_cast<int>(std::lround(unit_w * ratio)));
  const int hole_h = std::max(1, static_cast<int>(std::lround(unit_h * ratio)));
  const int shift_x = rng.UniformInt(0, unit_w - hole_w);
  const int shift_y = rng.UniformInt(0, unit_h - hole_h);
  cv::Mat out = img.clone();
  for (int y = shift_y; y < img.rows; y += unit_h) {
    for (int x = shift_x; x < img.cols; x += unit_w) {
      const cv::Rect hole(x, y, std::min(hole_w, img.cols - x),
                          std::min(hole_h, img.rows - y));
      out(hole).setTo(kFill);
    }
  }
  return out;
}

cv::Mat CoarseDropout(const cv::Mat& img, const TransformSpec& s,
                      SeededRng& rng) {
  const ParamRange& holes = s.param("holes");
  const ParamRange& frac = s.param("hole_fraction");
  const int n = rng.UniformInt(static_cast<int>(holes.lo), static_cast<int>(holes.hi));
  cv::Mat out = img.clone();
  for (int i = 0; i < n; ++i) {
    const int hh = std::max(1, static_cast<int>(std::lround(Draw(rng, frac) * img.rows)));
    const int hw = std::max(1, static_cast<int>(std::lround(Draw(rng, frac) * img.cols)));
    const int y = rng.UniformInt(0, img.rows - hh);
    const int x = rng.UniformInt(0, img.cols - hw);
    out(cv::Rect(x, y, hw, hh)).setTo(kFill);
  }
  return out;
}

const std::map<std::string, TransformFn>& Registry() {
  static const std::map<std::string, TransformFn> registry{
      {"brightness_contrast", BrightnessContrast},
      {"safe_rotate", SafeRotate},
      {"gaussian_blur", GaussianBlur},
      {"clahe", Clahe},
      {"random_gamma", RandomGamma},
      {"hue_saturation_value", HueSaturationValue},
      {"random_scale", RandomScale},
      {"rgb_shift", RgbShift},
      {"median_blur", MedianBlur},
      {"image_compression", ImageCompression},
      {"sharpen", Sharpen},
      {"planckian_jitter", PlanckianJitter},
      {"random_fog", RandomFog},
      {"random_tone_curve", RandomToneCurve},
      {"emboss", Emboss},
      {"grid_distortion", GridDistortion},
      {"perspective", Perspective},
      {"grid_dropout", GridDropout},
      {"coarse_dropout", CoarseDropout},
  };
  return registry;
}

}  // namespace

const ParamRange& TransformSpec::param(const std::string& key) const {
  for (const NamedRange& p : params) {
    if (p.name == key) return p.range;
  }
  throw Error(ErrorCode::kNotFound, name + " has no parameter " + key);
}

const std::vector<TransformSpec>& Catalog(ImageStrength strength) {
  static const std::vector<TransformSpec> high = HighCatalog();
  static const std::vector<TransformSpec> medium = MediumCatalog();
  static const std::vector<TransformSpec> low = LowCatalog();
  switch (strength) {
    case ImageStrength::kHigh: return high;
    case ImageStrength::kMedium: return medium;
    case ImageStrength::kLow: return low;
  }
  return high;
}

std::vector<PlannedTransform> PlanImageAug(ImageStrength strength,
                                           std::uint64_t seed) {
  const auto& catalog = Catalog(strength);
  std::vector<int> pool(catalog.size());
  std::iota(pool.begin(), pool.end(), 0);
  SeededRng rng(seed);
  std::vector<PlannedTransform> plan;
  for (int k = 0; k < kTransformsPerImage; ++k) {
    const size_t pick = static_cast<size_t>(k) + rng.Index(pool.size() - k);
    std::swap(pool[static_cast<size_t>(k)], pool[pick]);
    plan.push_back({pool[static_cast<size_t>(k)], false, 0});
  }
  for (PlannedTransform& t : plan) {
    t.applied = rng.Bernoulli(catalog[static_cast<size_t>(t.index)].apply_prob);
    t.seed = rng.NextU64();
  }
  return plan;
}

Image ApplyTransform(const Image& image, const TransformSpec& spec,
                     std::uint64_t seed) {
  if (image.empty()) throw Error(ErrorCode::kEmptyImage, "empty image");
  const auto it = Registry().find(spec.name);
  if (it == Registry().end()) {
    throw Error(ErrorCode::kNotFound, "unknown transform " + spec.name);
  }
  SeededRng rng(seed);
  return internal::FromMat(it->second(internal::ToMat(image), spec, rng));
}

Image ApplyImageAug(const Image& image, ImageStrength strength,
                    std::uint64_t seed) {
  if (image.empty()) throw Error(ErrorCode::kEmptyImage, "empty image");
  const auto& catalog = Catalog(strength);
  Image out = image;
  for (const PlannedTransform& t : PlanImageAug(strength, seed)) {
    if (!t.applied) continue;
    out = ApplyTransform(out, catalog[static_cast<size_t>(t.index)], t.seed);
  }
  return out;
}

}  // namespace ttscale
