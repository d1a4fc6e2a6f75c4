#include "tactbci/robot.hpp"

#include <cstdlib>
#include <sstream>
#include <stdexcept>

namespace tactbci {

namespace {

const char* kNames[kNumCommands] = {"LEFT", "RIGHT", "FORWARD", "BACK", "GRASP", "RELEASE"};

bool in_bounds(GridPos p, int w, int h) { return p.x >= 0 && p.x < w && p.y >= 0 && p.y < h; }

void append_axis_moves(std::vector<RobotCommand>& script, int delta, RobotCommand neg,
                       RobotCommand pos) {
  for (int i = 0; i < std::abs(delta); ++i) script.push_back(delta < 0 ? neg : pos);
}

// x-axis-first Manhattan walk.
void append_moves(std::vector<RobotCommand>& script, GridPos from, GridPos to) {
  append_axis_moves(script, to.x - from.x, RobotCommand::kLeft, RobotCommand::kRight);
  append_axis_moves(script, to.y - from.y, RobotCommand::kBack, RobotCommand::kForward);
}

}  // namespace

RobotCommand command_from_id(CommandId id) {
  if (!valid_command(id)) throw std::invalid_argument("command_from_id: index out of range");
  return static_cast<RobotCommand>(id);
}

CommandId command_to_id(RobotCommand cmd) { return static_cast<CommandId>(cmd); }

const char* command_name(RobotCommand cmd) { return kNames[command_to_id(cmd)]; }

RobotCommand command_from_name(const std::string& name) {
  for (int i = 0; i < kNumCommands; ++i) {
    if (name == kNames[i]) return static_cast<RobotCommand>(i);
  }
  throw std::invalid_argument("command_from_name: unknown command '" + name + "'");
}

void RobotState::validate() const {
  if (width <= 0 || height <= 0) throw std::invalid_argument("RobotState: non-positive bounds");
  if (!in_bounds(gripper, width, height)) throw std::invalid_argument("RobotState: gripper out of bounds");
  if (!holding && !in_bounds(object, width, height)) {
    throw std::invalid_argument("RobotState: object out of bounds");
  }
  if (!in_bounds(goal, width, height)) throw std::invalid_argument("RobotState: goal out of bounds");
}

void TaskSpec::validate() const {
  start.validate();
  if (start.object_position() == start.goal) {
    throw std::invalid_argument("TaskSpec: object must not start on the goal cell");
  }
}

RobotState apply(const RobotState& state, RobotCommand cmd) {
  RobotState next = state;
  next.last_action_effect = ActionEffect::kApplied;
  switch (cmd) {
    case RobotCommand::kLeft:
    case RobotCommand::kRight:
    case RobotCommand::kForward:
    case RobotCommand::kBack: {
      GridPos target = state.gripper;
      if (cmd == RobotCommand::kLeft) target.x -= 1;
      if (cmd == RobotCommand::kRight) target.x += 1;
      if (cmd == RobotCommand::kForward) target.y += 1;
      if (cmd == RobotCommand::kBack) target.y -= 1;
      if (in_bounds(target, state.width, state.height)) {
        next.gripper = target;
      } else {
        next.last_action_effect = ActionEffect::kNoOp;  // clamp at edge
      }
      break;
    }
    case RobotCommand::kGrasp:
      if (!state.holding && state.gripper == state.object) {
        next.holding = true;
      } else {
        next.last_action_effect = ActionEffect::kNoOp;
      }
      break;
    case RobotCommand::kRelease:
      if (state.holding) {
        next.holding = false;
        next.object = state.gripper;
      } else {
        next.last_action_effect = ActionEffect::kNoOp;
      }
      break;
  }
  return next;
}

std::vector<RobotCommand> optimal_script(const TaskSpec& task) {
  task.validate();  // out-of-bounds object/goal is the unreachable case
  const RobotState& s = task.start;

  std::vector<RobotCommand> script;
  if (!s.holding) {
    append_moves(script, s.gripper, s.object);
    script.push_back(RobotCommand::kGrasp);
    append_moves(script, s.object, s.goal);
  } else {
    append_moves(script, s.gripper, s.goal);
  }
  script.push_back(RobotCommand::kRelease);
  return script;
}

TaskRun run_task(const TaskSpec& task, const std::vector<RobotCommand>& commands) {
  TaskRun run;
  RobotState state = task.start;
  run.trace.reserve(commands.size());
  for (RobotCommand cmd : commands) {
    state = apply(state, cmd);
    run.trace.push_back(state);
  }
  run.success = !state.holding && state.object_position() == state.goal;
  return run;
}

TaskSpec default_task() {
  TaskSpec task;
  task.start.gripper = {0, 0};
  task.start.object = {2, 0};
  task.start.goal = {2, 2};
  task.start.width = 5;
  task.start.height = 5;
  task.description = "pick the object two cells right and move it two cells forward";
  return task;
}

std::string render(const RobotState& state) {
  std::ostringstream os;
  for (int y = state.height - 1; y >= 0; --y) {
    for (int x = 0; x < state.width; ++x) {
      const GridPos here{x, y};
      char c = '.';
      if (here == state.goal) c = 'x';
      if (!state.holding && here == state.object) c = (here == state.goal) ? '$' : 'o';
      if (here == state.gripper) {
        if (state.holding) {
          c = '@';
        } else {
          c = (here == state.object) ? 'G' : 'g';
        }
      }
      os << c << ' ';
    }
    os << '\n';
  }
  os << "gripper(" << state.gripper.x << ',' << state.gripper.y << ") "
     << (state.holding ? "holding" : "empty") << ", object("
     << state.object_position().x << ',' << state.object_position().y << "), goal("
     << state.goal.x << ',' << state.goal.y << ")\n";
  return os.str();
}

}  // namespace tactbci
