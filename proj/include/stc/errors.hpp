#pragma once

// SPDX-License-Identifier: Apache-2.0

#include <stdexcept>
#include <string>

namespace stc {

/// Base for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input document does not match the expected schema. `path()` is a JSON
/// pointer-like location ("$.subtasks[1].executor_steps[0].plan_and_code").
class SchemaError : public Error {
 public:
  SchemaError(std::string path, const std::string& message)
      : Error(path + ": " + message), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

class PatternError : public Error {
 public:
  using Error::Error;
};

class MissingSeed : public Error {
 public:
  MissingSeed() : Error("strategy 'random' requires a seed") {}
};

class EpochOutOfRange : public Error {
 public:
  using Error::Error;
};

class UnclassifiedSteps : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Emission aborted on one task; `task_id()` names it.
class TaskError : public Error {
 public:
  TaskError(std::string task_id, const std::string& message)
      : Error("task '" + task_id + "': " + message), task_id_(std::move(task_id)) {}
  const std::string& task_id() const noexcept { return task_id_; }

 private:
  std::string task_id_;
};

class EmptyRunSet : public Error {
 public:
  EmptyRunSet() : Error("run set is empty") {}
};

class UnknownAgent : public Error {
 public:
  explicit UnknownAgent(std::string agent)
      : Error("agent '" + agent + "' is not present in the system config"), agent_(std::move(agent)) {}
  const std::string& agent() const noexcept { return agent_; }

 private:
  std::string agent_;
};

class EmptyPointSet : public Error {
 public:
  EmptyPointSet() : Error("point set is empty") {}
};

class TemplateError : public Error {
 public:
  using Error::Error;
};

/// Transport failure or non-success HTTP status from the chat endpoint.
class EndpointError : public Error {
 public:
  EndpointError(const std::string& message, int status = 0) : Error(message), status_(status) {}
  int status() const noexcept { return status_; }

 private:
  int status_;
};

class ConversionFailed : public Error {
 public:
  ConversionFailed(const std::string& message, std::string last_response, int attempts)
      : Error(message), last_response_(std::move(last_response)), attempts_(attempts) {}
  const std::string& last_response() const noexcept { return last_response_; }
  int attempts() const noexcept { return attempts_; }

 private:
  std::string last_response_;
  int attempts_;
};

}  // namespace stc
