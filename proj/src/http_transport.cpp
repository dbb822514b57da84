// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The CA-TTS Authors

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <cmath>

#include "catts/error.hpp"
#include "catts/http_backend.hpp"

namespace catts {

HttpTransport make_http_transport(const HttpConfig& config) {
  if (config.endpoint.empty()) throw Error(Errc::Config, "HTTP endpoint is empty");
  return [config](const std::string& path, const std::string& body, const HttpHeaders& headers) {
    httplib::Client client(config.endpoint);
    const auto secs = static_cast<time_t>(config.timeout_s);
    const auto usecs = static_cast<time_t>((config.timeout_s - std::floor(config.timeout_s)) * 1e6);
    client.set_connection_timeout(secs, usecs);
    client.set_read_timeout(secs, usecs);
    client.set_write_timeout(secs, usecs);
    httplib::Headers h;
    std::string content_type = "application/json";
    for (const auto& [k, v] : headers) {
      if (k == "Content-Type") content_type = v;
      else h.emplace(k, v);
    }
    auto res = client.Post(path, h, body, content_type);
    if (!res) {
      const auto err = res.error();
      const Errc code = err == httplib::Error::Read || err == httplib::Error::Write ||
                                err == httplib::Error::ConnectionTimeout
                            ? Errc::Timeout
                            : Errc::Transport;
      throw Error(code, config.endpoint + path + ": " + httplib::to_string(err));
    }
    return HttpReply{res->status, res->body};
  };
}

}  // namespace catts
