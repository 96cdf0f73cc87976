#pragma once

/// \file curl_transport.hpp
/// \brief libcurl-backed `Transport` for fetch_matrix. Requires libcurl.

#include <curl/curl.h>

#include <mutex>
#include <string>

#include "adkrylov/fetch.hpp"

namespace adkrylov {

inline HttpResponse curl_get(const std::string& url) {
  static std::once_flag init;
  std::call_once(init, [] { curl_global_init(CURL_GLOBAL_DEFAULT); });

  HttpResponse resp;
  CURL* h = curl_easy_init();
  if (!h) {
    resp.error = "curl_easy_init failed";
    return resp;
  }
  auto sink = +[](char* ptr, std::size_t size, std::size_t nmemb, void* user) -> std::size_t {
    static_cast<std::string*>(user)->append(ptr, size * nmemb);
    return size * nmemb;
  };
  curl_easy_setopt(h, CURLOPT_URL, url.c_str());
  curl_easy_setopt(h, CURLOPT_FOLLOWLOCATION, 1L);
  curl_easy_setopt(h, CURLOPT_WRITEFUNCTION, sink);
  curl_easy_setopt(h, CURLOPT_WRITEDATA, &resp.body);
  curl_easy_setopt(h, CURLOPT_CONNECTTIMEOUT, 30L);
  curl_easy_setopt(h, CURLOPT_USERAGENT, "adkrylov/1.0");
  const CURLcode rc = curl_easy_perform(h);
  if (rc != CURLE_OK) resp.error = curl_easy_strerror(rc);
  curl_easy_getinfo(h, CURLINFO_RESPONSE_CODE, &resp.status);
  curl_easy_cleanup(h);
  return resp;
}

}  // namespace adkrylov
