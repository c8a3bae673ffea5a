#pragma once

// JSON-over-HTTP front end for SessionServer.
//
//   POST /sessions                      -> {session_id, treatment, phase, payload}
//   GET  /sessions/{id}/next[?ack=...]  -> phase payload
//   POST /sessions/{id}/decision        {instance_id, meta_choice, submitted_label, client_elapsed?}
//   POST /sessions/{id}/comprehension   {answers: [int]}
//   POST /sessions/{id}/questionnaire   {tlx_scores: [6 numbers], free_text?}
//   GET  /export[?treatment=&completed_only=1&format=json|records|summaries]
//
// Errors come back as {"error": <code>, "message": <text>}.

#include <httplib.h>

#include <sstream>
#include <string>

#include "inclab/session.hpp"

namespace inclab {

inline int http_status(SessionErrorCode c) {
  switch (c) {
    case SessionErrorCode::not_found: return 404;
    case SessionErrorCode::state: return 409;
    case SessionErrorCode::validation: return 400;
    case SessionErrorCode::timer_expired: return 409;
    case SessionErrorCode::capacity: return 503;
  }
  return 500;
}

namespace detail {

inline void send_json(httplib::Response& res, const nlohmann::ordered_json& j, int status = 200) {
  res.status = status;
  res.set_content(j.dump(), "application/json");
}

inline void send_error(httplib::Response& res, int status, std::string_view code, const std::string& message) {
  nlohmann::ordered_json j;
  j["error"] = std::string(code);
  j["message"] = message;
  send_json(res, j, status);
}

template <typename F>
void guarded(httplib::Response& res, F&& body) {
  try {
    body();
  } catch (const SessionError& e) {
    send_error(res, http_status(e.code()), to_string(e.code()), e.what());
  } catch (const nlohmann::json::exception& e) {
    send_error(res, 400, "validation_error", std::string("bad request body: ") + e.what());
  } catch (const DomainError& e) {
    send_error(res, 400, "validation_error", e.what());
  } catch (const std::exception& e) {
    send_error(res, 500, "internal_error", e.what());
  }
}

}  // namespace detail

/// Register the study routes on `http`. `server` must outlive it.
inline void bind_routes(httplib::Server& http, SessionServer& server) {
  using detail::guarded;
  using detail::send_json;

  http.Post("/sessions", [&server](const httplib::Request&, httplib::Response& res) {
    guarded(res, [&] { send_json(res, server.create_session(), 201); });
  });

  http.Get(R"(/sessions/([^/]+)/next)", [&server](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      std::optional<Phase> ack;
      if (req.has_param("ack")) ack = phase_from_string(req.get_param_value("ack"));
      send_json(res, server.advance(req.matches[1], ack));
    });
  });

  http.Post(R"(/sessions/([^/]+)/decision)", [&server](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto body = nlohmann::json::parse(req.body);
      DecisionSubmission d;
      d.instance_id = body.at("instance_id").get<std::string>();
      d.meta_choice = meta_decision_from_string(body.at("meta_choice").get<std::string>());
      d.submitted_label = body.at("submitted_label").get<int>();
      if (body.contains("client_elapsed") && !body["client_elapsed"].is_null())
        d.client_elapsed = body["client_elapsed"].get<double>();
      send_json(res, to_json(server.submit_decision(req.matches[1], d)));
    });
  });

  http.Post(R"(/sessions/([^/]+)/comprehension)", [&server](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto body = nlohmann::json::parse(req.body);
      const std::string id = req.matches[1];
      const auto result = server.submit_comprehension(id, body.at("answers").get<std::vector<int>>());
      nlohmann::ordered_json j;
      j["result"] = result;
      j["phase"] = std::string(to_string(server.state(id).phase));
      send_json(res, j);
    });
  });

  http.Post(R"(/sessions/([^/]+)/questionnaire)", [&server](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto body = nlohmann::json::parse(req.body);
      const auto st = server.submit_questionnaire(req.matches[1], body.at("tlx_scores").get<std::vector<double>>(),
                                                  body.value("free_text", std::string{}));
      auto j = to_json(st);
      j["phase"] = "done";
      send_json(res, j);
    });
  });

  http.Get("/export", [&server](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      ExportFilter f;
      if (req.has_param("treatment")) {
        try {
          f.treatment = treatment_kind_from_string(req.get_param_value("treatment"));
        } catch (const DomainError& e) {
          throw SessionError(SessionErrorCode::validation, e.what());
        }
      }
      if (req.has_param("completed_only")) f.completed_only = req.get_param_value("completed_only") == "1";
      const auto data = server.export_records(f);
      const std::string format = req.has_param("format") ? req.get_param_value("format") : "json";
      if (format == "records" || format == "summaries") {
        std::ostringstream os;
        if (format == "records") {
          write_jsonl<DecisionRecord>(os, data.records);
        } else {
          write_jsonl<ParticipantSummary>(os, data.summaries);
        }
        res.set_content(os.str(), "application/x-ndjson");
        return;
      }
      if (format != "json") throw SessionError(SessionErrorCode::validation, "unknown export format '" + format + "'");
      nlohmann::ordered_json j;
      j["records"] = nlohmann::ordered_json::array();
      for (const auto& r : data.records) j["records"].push_back(to_json(r));
      j["summaries"] = nlohmann::ordered_json::array();
      for (const auto& s : data.summaries) j["summaries"].push_back(to_json(s));
      send_json(res, j);
    });
  });

  if (server.options().settings.static_dir) {
    if (!http.set_mount_point("/", *server.options().settings.static_dir))
      throw ConfigError("static_dir does not exist: " + *server.options().settings.static_dir);
  }
}

}  // namespace inclab
