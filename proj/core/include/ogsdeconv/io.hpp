#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>

#include "ogsdeconv/image.hpp"

namespace ogsd::io {

/// Malformed or unreadable input file.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PgmImage {
  Image image;       ///< normalized to [0, 1] by maxval
  int maxval = 255;  ///< 1..65535
};

/// Reads binary (P5) or ASCII (P2) PGM, 8- or 16-bit.
PgmImage read_pgm(const std::filesystem::path& path);
PgmImage parse_pgm(const std::string& bytes);

enum class PgmEncoding { binary, ascii };

/// Clamps to [0, 1] and quantizes to maxval.
void write_pgm(const std::filesystem::path& path, const Image& img, int maxval = 255,
               PgmEncoding encoding = PgmEncoding::binary);
std::string encode_pgm(const Image& img, int maxval = 255,
                       PgmEncoding encoding = PgmEncoding::binary);

/// Kernel text format: header line "k k", then k rows of k decimals.
Kernel read_kernel(const std::filesystem::path& path);
Kernel parse_kernel(const std::string& text);
void write_kernel(const std::filesystem::path& path, const Kernel& h);
std::string format_kernel(const Kernel& h);

/// Flat key=value configuration. Blank lines and lines starting with '#'
/// are ignored; keys and values are trimmed.
std::map<std::string, std::string> parse_key_values(const std::string& text);
std::map<std::string, std::string> read_key_values(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace ogsd::io
