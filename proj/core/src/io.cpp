#include "ogsdeconv/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace ogsd::io {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  out << contents;
  if (!out) throw FormatError("write failed for " + path.string());
}

namespace {

// Reads the next whitespace-delimited header token, skipping '#' comments.
class HeaderReader {
 public:
  explicit HeaderReader(const std::string& bytes) : bytes_(bytes) {}

  int next_int() {
    skip();
    std::size_t start = pos_;
    while (pos_ < bytes_.size() && std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) ++pos_;
    if (start == pos_) throw FormatError("PGM: expected an integer in header");
    const std::string token = bytes_.substr(start, pos_ - start);
    if (token.size() > 9) throw FormatError("PGM: header value too large");
    return std::stoi(token);
  }
  // Consumes the single whitespace byte that separates header and raster.
  std::size_t raster_start() {
    if (pos_ >= bytes_.size() || !std::isspace(static_cast<unsigned char>(bytes_[pos_])))
      throw FormatError("PGM: missing whitespace before raster");
    return pos_ + 1;
  }
  std::size_t position() const { return pos_; }

 private:
  void skip() {
    while (pos_ < bytes_.size()) {
      const char ch = bytes_[pos_];
      if (ch == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(ch))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  const std::string& bytes_;
  std::size_t pos_ = 2;
};

}  // namespace

PgmImage parse_pgm(const std::string& bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '2'))
    throw FormatError("PGM: missing P5/P2 magic");
  const bool binary = bytes[1] == '5';
  HeaderReader header(bytes);
  const int width = header.next_int();
  const int height = header.next_int();
  const int maxval = header.next_int();
  if (width <= 0 || height <= 0) throw FormatError("PGM: non-positive dimensions");
  if (maxval <= 0 || maxval > 65535) throw FormatError("PGM: maxval out of range");

  const std::size_t n = static_cast<std::size_t>(width) * height;
  std::vector<double> data(n);
  if (binary) {
    const std::size_t start = header.raster_start();
    const std::size_t bytes_per = maxval > 255 ? 2 : 1;
    if (bytes.size() < start + n * bytes_per) throw FormatError("PGM: truncated raster");
    for (std::size_t i = 0; i < n; ++i) {
      unsigned value = static_cast<unsigned char>(bytes[start + i * bytes_per]);
      if (bytes_per == 2)
        value = (value << 8) | static_cast<unsigned char>(bytes[start + i * 2 + 1]);
      if (value > static_cast<unsigned>(maxval)) throw FormatError("PGM: sample exceeds maxval");
      data[i] = static_cast<double>(value) / maxval;
    }
  } else {
    std::istringstream rest(bytes.substr(header.position()));
    for (std::size_t i = 0; i < n; ++i) {
      long value = -1;
      if (!(rest >> value)) throw FormatError("PGM: truncated ASCII raster");
      if (value < 0 || value > maxval) throw FormatError("PGM: sample out of range");
      data[i] = static_cast<double>(value) / maxval;
    }
  }
  return {Image(height, width, std::move(data)), maxval};
}

PgmImage read_pgm(const std::filesystem::path& path) {
  try {
    return parse_pgm(read_file(path));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

std::string encode_pgm(const Image& img, int maxval, PgmEncoding encoding) {
  if (maxval <= 0 || maxval > 65535) throw std::invalid_argument("PGM maxval out of range");
  std::ostringstream out;
  out << (encoding == PgmEncoding::binary ? "P5" : "P2") << '\n'
      << img.width() << ' ' << img.height() << '\n'
      << maxval << '\n';
  auto quantize = [maxval](double v) {
    const double c = std::isfinite(v) ? std::clamp(v, 0.0, 1.0) : 0.0;
    return static_cast<unsigned>(std::lround(c * maxval));
  };
  int column = 0;
  for (double v : img.values()) {
    const unsigned q = quantize(v);
    if (encoding == PgmEncoding::binary) {
      if (maxval > 255) out.put(static_cast<char>(q >> 8));
      out.put(static_cast<char>(q & 0xFF));
    } else {
      out << q << (++column % img.width() == 0 ? '\n' : ' ');
    }
  }
  return out.str();
}

void write_pgm(const std::filesystem::path& path, const Image& img, int maxval,
               PgmEncoding encoding) {
  write_file(path, encode_pgm(img, maxval, encoding));
}

Kernel parse_kernel(const std::string& text) {
  std::istringstream in(text);
  int rows = 0;
  int cols = 0;
  if (!(in >> rows >> cols)) throw FormatError("kernel: missing 'k k' header");
  if (rows != cols || rows <= 0 || rows % 2 == 0)
    throw FormatError("kernel: size must be square, positive and odd");
  std::vector<double> data(static_cast<std::size_t>(rows) * cols);
  for (double& v : data) {
    if (!(in >> v)) throw FormatError("kernel: expected " + std::to_string(rows * cols) + " values");
    if (!std::isfinite(v)) throw FormatError("kernel: non-finite entry");
  }
  std::string trailing;
  if (in >> trailing) throw FormatError("kernel: unexpected trailing data");
  return Kernel(rows, std::move(data));
}

Kernel read_kernel(const std::filesystem::path& path) {
  try {
    return parse_kernel(read_file(path));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

std::string format_kernel(const Kernel& h) {
  std::ostringstream out;
  out << h.size() << ' ' << h.size() << '\n' << std::setprecision(17);
  for (int r = 0; r < h.size(); ++r) {
    for (int c = 0; c < h.size(); ++c)
      out << (c ? " " : "") << h.values()[static_cast<std::size_t>(r) * h.size() + c];
    out << '\n';
  }
  return out.str();
}

void write_kernel(const std::filesystem::path& path, const Kernel& h) {
  write_file(path, format_kernel(h));
}

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

}  // namespace

std::map<std::string, std::string> parse_key_values(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw FormatError("config line " + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(t.substr(0, eq));
    if (key.empty()) throw FormatError("config line " + std::to_string(lineno) + ": empty key");
    out[key] = trim(t.substr(eq + 1));
  }
  return out;
}

std::map<std::string, std::string> read_key_values(const std::filesystem::path& path) {
  return parse_key_values(read_file(path));
}

}  // namespace ogsd::io
