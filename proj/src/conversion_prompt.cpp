// SPDX-License-Identifier: Apache-2.0

#include <string>

namespace stc::detail {

// Placeholders: <task_description>, <first_name>, <last_name>, <email>,
// <phone_number>, <single_agent_trajectory> and the example marker line.
extern const char* const kConversionPrompt;
const char* const kConversionPrompt = R"PROMPT(I am your supervisor and you are a highly intelligent AI Assistant. Your task is to transform a single-agent trajectory into a multi-agent trajectory for tasks in the AppWorld environment. The single-agent trajectory sucessfully resolved the task, so you need to ensure that the multi-agent trajectory also resolves the task successfully if I run the steps by order in the environment.

# AppWorld Environment Overview
AppWorld is a simulated environment with 9 day-to-day apps that mimic real-world applications. This environment provides these following apps through the `apis` object:
- amazon: Shopping and order management
- spotify: Music streaming and playlist management
- gmail: Email communication and management
- todoist: Task and to-do list management
- simple_note: Note-taking and organization
- venmo: Person-to-person payments
- splitwise: Expense tracking and settlement
- file_system: File operations and management
- phone: Calling and messaging functionality

Additionally, there are 2 helper applications:
- api_docs: Provides interactive documentation lookup for all apps
- supervisor: Provides access to personal information (addresses, payment cards, account passwords)

# Key API Commands
- `apis.api_docs.show_app_descriptions()`: List available apps
- `apis.api_docs.show_api_descriptions(app_name=<app_name>)`: List APIs for an app
- `apis.api_docs.show_api_doc(app_name=<app_name>, api_name=<api_name>)`: Get API details
- `apis.app_name.api_name(args)`: Call an API
- `apis.supervisor.complete_task(answer=<answer>)`: Complete task

# Multi-Agent Framework
Your transformation will involve two agents:

1. **Orchestrator Agent**:
- Reviews the task and determines the next logical subtask
- Provides detailed subtask descriptions to the Executor
- Receives completion reports from the Executor

2. **Executor Agent**:
- Performs the subtasks defined by the Orchestrator
- Not aware of the overall task, only focused on the current subtask
- Works in a Python REPL environment executing code step-by-step to accomplish the subtask
- Reports back to the Orchestrator upon subtask completion

# Transformation Guidelines
## Subtask Design
- Create meaningful, logical subtasks that progress toward the overall goal
- Each subtask should be a discrete step toward completing the task
- Supervisor is the user, so use 'user' when talking about the who is using the app, for example "Find the song user liked" rather than "Find the song 'I', or 'you' liked"
- Authentication/login to an app should always be a separate subtask
- Must ensure the final subtask involves calling the task completion API. Orchestrator agent should instruct to call `apis.supervisor.complete_task()`. If the task requires information, should ask to return it using the answer parameter: `apis.supervisor.complete_task(answer=<answer>)`.

## Subtask Description Format
- Begin with a brief description of the subtask's goal
- List all possible logical steps in details by order to accomplish the subtask. The order of the steps should be the same as the order of the steps in the original single-agent trajectory
- For authentication related subtasks, include these specific steps:
  - Add supervisor name, email, and phone number to the description as this info will be helpful for the Executor agent for authentication
  - Suggest to explore the API documentation of the app using `apis.api_docs.show_api_descriptions (app_name=<app_name>)` to find the authentication-related API
  - Suggest to check the detailed documentation of the authentication API using `apis.api_docs.show_api_doc (app_name=<app_name>, api_name=<api_name>)` to understand its arguments and output structure.
  - For username, suggest to use username (e.g., email address, phone number, etc.) given in the subtask description
  - For password, suggest to find the account's password retrieval API from the "supervisor" app and call the API to retrieve the password
  - Suggest to call the login API using `apis.<app_name>.<login_api> (username=<username>, password=<password>)` with the collected username and password. And store the token for future use
- For other subtasks,
  - List the steps in natural language format
  - Specify the possible apps that can be used to achieve the subtask's goal. Don't include any API names as orchestrator don't have knowledge of the API names
  - **Don't include actual API names in the description, instead suggest to explore the API documentation using `apis.api_docs.show_api_descriptions (app_name=<app_name>)` to find the relevant API. Then suggest to findout relevent APIs**
  - Suggest to check the detailed documentation of the relevent API using `apis.api_docs.show_api_doc (app_name=<app_name>, api_name=<api_name>)` to understand its arguments and output structure.
- In the subtask description, include actual path, file or people names, if mentioned in the task description. For example, mention actual path instead of saying "...the specified path..."
- For final subtask, **must include a note to call the task completion API using `apis.supervisor.complete_task(answer=<answer>)` to signal that the overall task has been completed. If the task requires information, should ask to return it using the answer parameter: `apis.supervisor.complete_task(answer=<answer>)`**
- End with instruction to report back upon completion

## Executor Steps Format
- Each step (thought and code) must be identical to the original step in the single-agent trajectory
- Must include both the thought and the code exactly as in the original step
- Must enclosed on code in <code> </code> tags
- Upon subtask completion, add a summary and exit command: <code>exit</code>. Summary should include what executor agent has accomplished in the subtask and signal to the Orchestrator agent that the subtask is complete.

## Output Requirements
- IMPORTANT: You must respond ONLY with valid JSON. Do not include any explanatory text, introductions, or markdown formatting outside of the JSON object. Your entire response must be parseable as JSON.
- Follow the exact JSON structure shown in the below example. The example provided below is for illustrative purposes only. In the given example- the App, and API names were only for demonstration.
- Do not exclude any original step or code
- Do not invent new code except for the final exit command
- Preserve all original steps; it's thought as well as the code
- Divide into logical subtasks with authentication always as a separate subtask
- Define thought first and then format only code within <code> tags and end each subtask with <code>exit</code>
- Do not include actual API names in the description, instead suggest to explore the API documentation using `apis.api_docs.show_api_descriptions(app_name=<app_name>)` to find the relevant API. Then suggest to findout relevent APIs. Then check the detailed documentation of the relevent API using `apis.api_docs.show_api_doc(app_name=<app_name>, api_name=<api_name>)` to understand its arguments and output structure.
- Use the placeholder `<app_name>` and `<api_name>` in the subtask description, because the orchestrator agent doesn't know the API names
- In final subtask, include a note to call the task completion API using `apis.supervisor.complete_task(answer=<answer>)` to signal that the overall task has been completed. If the task requires information, should ask to return it using the answer parameter: `apis.supervisor.complete_task(answer=<answer>)`

Your goal is to transform a single-agent trajectory into a multi-agent trajectory following the JSON schema below:
{
  "subtasks": [
    {
      "subtask_number": <integer>,
      "subtask_description": <string>,
      "executor_steps": [
        {
          "subtask_number": <integer>,
          "step_number": <integer>,
          "plan_and_code": <string and <code> code </code> >
        },
      ]
    },
  ]
}

For example, consider the following task and the multi-agent trajectory solution where two agents are solving the task.

[Example Multi-Agent Trajectory Placeholder]

Now translate the actual single-agent trajectory into a multi-agent trajectory:

Actual task: <task_description>
Supervisor name is: <first_name> <last_name>. Email is <email> and phone number is <phone_number>.

The single-agent trajectory is as follows: <single_agent_trajectory>
)PROMPT";

extern const char* const kDefaultExemplar;
const char* const kDefaultExemplar = R"EXAMPLE(Task: What is the title of the most-liked song in my Spotify playlists.
Supervisor name is: Joyce Weaver. Email is joyce-weav@gmail.com and phone number is 3155673041.

{
  "subtasks": [
    {
      "subtask_number": 1,
      "subtask_description": "Log in to the user's Spotify account. The user is Joyce Weaver, email joyce-weav@gmail.com, phone number 3155673041. Explore the API documentation using `apis.api_docs.show_api_descriptions(app_name='spotify')` to find the authentication-related API and check its details with `apis.api_docs.show_api_doc(app_name='spotify', api_name=<api_name>)`. Retrieve the account password through the supervisor app, call the login API with the email as username, store the access token and report back upon completion.",
      "executor_steps": [
        {"subtask_number": 1, "step_number": 1, "plan_and_code": "Let me find the Spotify APIs.\n<code>print(apis.api_docs.show_api_descriptions(app_name='spotify'))</code>"},
        {"subtask_number": 1, "step_number": 2, "plan_and_code": "I need the supervisor's Spotify password.\n<code>passwords = apis.supervisor.show_account_passwords()\nspotify_password = [p for p in passwords if p['account_name'] == 'spotify'][0]['password']</code>"},
        {"subtask_number": 1, "step_number": 3, "plan_and_code": "Now log in and keep the token.\n<code>token = apis.spotify.login(username='joyce-weav@gmail.com', password=spotify_password)['access_token']</code>"},
        {"subtask_number": 1, "step_number": 4, "plan_and_code": "Logged in to Spotify and stored the access token in `token`. The subtask is complete.\n<code>exit</code>"}
      ]
    },
    {
      "subtask_number": 2,
      "subtask_description": "Find the most-liked song across all of the user's Spotify playlists using the access token from the previous subtask. Explore the Spotify API documentation to find the relevant APIs for listing playlists and songs, then return the song title with `apis.supervisor.complete_task(answer=<answer>)` to signal that the overall task has been completed. Report back upon completion.",
      "executor_steps": [
        {"subtask_number": 2, "step_number": 1, "plan_and_code": "Collect songs from every playlist.\n<code>songs = []\nfor playlist in apis.spotify.show_playlist_library(access_token=token):\n    songs += apis.spotify.show_playlist(access_token=token, playlist_id=playlist['playlist_id'])['songs']</code>"},
        {"subtask_number": 2, "step_number": 2, "plan_and_code": "Pick the most-liked song and finish the task.\n<code>best = max(songs, key=lambda s: apis.spotify.show_song(song_id=s['id'])['like_count'])\napis.supervisor.complete_task(answer=best['title'])</code>"},
        {"subtask_number": 2, "step_number": 3, "plan_and_code": "Found the most-liked song and submitted its title. The subtask is complete.\n<code>exit</code>"}
      ]
    }
  ]
})EXAMPLE";

}  // namespace stc::detail
