#pragma once

// Page-turning device contract. A device only ever turns forward; there is
// no way to ask it to turn back.
//
// Serial wire protocol (ASCII, LF-terminated):
//   host -> device   TURN\n
//   device -> host   OK\n      once the page has been flipped
// Any other line from the device is ignored. No OK within the timeout is a
// DeviceTimeout; a broken stream is DeviceIo.

#include <fcntl.h>
#include <poll.h>
#include <termios.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <deque>
#include <string>
#include <thread>

#include "pageflip/error.hpp"

namespace pageflip {

struct DeviceAck {
  double latency_ms = 0.0;
};

class TurnDevice {
 public:
  virtual ~TurnDevice() = default;
  // Blocks until the device acknowledges. Throws DeviceTimeout or DeviceIo.
  virtual DeviceAck turn_page() = 0;
};

// In-process device. Reports its configured latency so session logs stay
// reproducible; only sleeps when asked to.
class MockDevice : public TurnDevice {
 public:
  enum class Outcome { Ack, Timeout, IoError };

  explicit MockDevice(double latency_ms = 20.0, bool sleep = false)
      : latency_ms_(latency_ms), sleep_(sleep) {}

  // Queue outcomes for the next calls; once drained, every call acks.
  void script(std::deque<Outcome> outcomes) { script_ = std::move(outcomes); }

  DeviceAck turn_page() override {
    ++calls_;
    Outcome next = Outcome::Ack;
    if (!script_.empty()) {
      next = script_.front();
      script_.pop_front();
    }
    if (next == Outcome::Timeout) throw DeviceTimeout(500);
    if (next == Outcome::IoError) throw DeviceIo("mock device I/O failure");
    if (sleep_) std::this_thread::sleep_for(std::chrono::duration<double, std::milli>(latency_ms_));
    ++turns_;
    return {latency_ms_};
  }

  int calls() const { return calls_; }
  int turns() const { return turns_; }

 private:
  double latency_ms_;
  bool sleep_;
  std::deque<Outcome> script_;
  int calls_ = 0;
  int turns_ = 0;
};

// Line-protocol device on a tty, pty or FIFO-like path.
class SerialDevice : public TurnDevice {
 public:
  SerialDevice(const std::string& path, int timeout_ms) : path_(path), timeout_ms_(timeout_ms) {
    fd_ = ::open(path.c_str(), O_RDWR | O_NOCTTY | O_NONBLOCK | O_CLOEXEC);
    if (fd_ < 0) throw DeviceIo("cannot open " + path + ": " + std::strerror(errno));
    if (::isatty(fd_)) {
      termios tio{};
      if (::tcgetattr(fd_, &tio) == 0) {
        ::cfmakeraw(&tio);
        ::cfsetispeed(&tio, B9600);
        ::cfsetospeed(&tio, B9600);
        ::tcsetattr(fd_, TCSANOW, &tio);
      }
    }
  }

  SerialDevice(const SerialDevice&) = delete;
  SerialDevice& operator=(const SerialDevice&) = delete;

  ~SerialDevice() override {
    if (fd_ >= 0) ::close(fd_);
  }

  int timeout_ms() const { return timeout_ms_; }

  DeviceAck turn_page() override {
    using Clock = std::chrono::steady_clock;
    drain();
    const auto start = Clock::now();
    write_all("TURN\n");

    const auto deadline = start + std::chrono::milliseconds(timeout_ms_);
    std::string line;
    char buf[256];
    while (true) {
      const auto now = Clock::now();
      if (now >= deadline) throw DeviceTimeout(timeout_ms_);
      const auto left = std::chrono::ceil<std::chrono::milliseconds>(deadline - now).count();
      pollfd pfd{fd_, POLLIN, 0};
      const int rc = ::poll(&pfd, 1, static_cast<int>(left));
      if (rc < 0) {
        if (errno == EINTR) continue;
        throw DeviceIo("poll on " + path_ + ": " + std::strerror(errno));
      }
      if (rc == 0) continue;
      if (pfd.revents & (POLLERR | POLLNVAL)) throw DeviceIo("stream error on " + path_);
      const ssize_t n = ::read(fd_, buf, sizeof buf);
      if (n < 0) {
        if (errno == EINTR || errno == EAGAIN) continue;
        throw DeviceIo("read from " + path_ + ": " + std::strerror(errno));
      }
      if (n == 0) throw DeviceIo("device closed the stream: " + path_);
      for (ssize_t i = 0; i < n; ++i) {
        if (buf[i] != '\n') {
          line.push_back(buf[i]);
          continue;
        }
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line == "OK") {
          const std::chrono::duration<double, std::milli> dt = Clock::now() - start;
          return {dt.count()};
        }
        line.clear();
      }
    }
  }

 private:
  // Discard anything the device sent before this command.
  void drain() {
    char buf[256];
    while (true) {
      const ssize_t n = ::read(fd_, buf, sizeof buf);
      if (n > 0) continue;
      if (n < 0 && errno == EINTR) continue;
      return;
    }
  }

  void write_all(const std::string& msg) {
    std::size_t off = 0;
    while (off < msg.size()) {
      const ssize_t n = ::write(fd_, msg.data() + off, msg.size() - off);
      if (n < 0) {
        if (errno == EINTR) continue;
        if (errno == EAGAIN) {
          pollfd pfd{fd_, POLLOUT, 0};
          ::poll(&pfd, 1, timeout_ms_);
          continue;
        }
        throw DeviceIo("write to " + path_ + ": " + std::strerror(errno));
      }
      off += static_cast<std::size_t>(n);
    }
  }

  std::string path_;
  int timeout_ms_;
  int fd_ = -1;
};

// PAGEFLIP_DEVICE_TIMEOUT_MS, when set to a positive integer, wins.
inline int device_timeout_from_env(int fallback_ms) {
  const char* env = std::getenv("PAGEFLIP_DEVICE_TIMEOUT_MS");
  if (!env || !*env) return fallback_ms;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v <= 0) {
    throw BadConfig(std::string("PAGEFLIP_DEVICE_TIMEOUT_MS must be a positive integer, got '") +
                    env + "'");
  }
  return static_cast<int>(v);
}

}  // namespace pageflip
