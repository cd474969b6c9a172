import pytest

from trajforge.errors import CodeExtractionError, DataValidationError, RenderError
from trajforge.prompts import (
    FUNC_NAME,
    PromptBundle,
    ReflectionMemory,
    default_bundle,
    extract_code_block,
    format_stats_block,
    load_template,
    parse_stats_block,
    placeholders,
    render,
    render_text,
    truncate_words,
)

GOLDEN = {
    "system_generator": (
        "You are an expert in the domain of prediction heuristics. Your task "
        "is to design heuristics that can effectively solve a prediction problem.\n"
        'Your response outputs Python code and nothing else. Format your code '
        'as a Python code string: "```python ... ```".\n'
    ),
    "system_reflector": (
        "You are an expert in the domain of prediction heuristics. Your task "
        "is to give hints to design better heuristics.\n"
    ),
    "task_description": (
        "Write a {function_name} function for {problem_description}\n"
        "{function_description}\n"
    ),
    "user_init": (
        "{task_description}\n"
        "\n"
        "{seed_function}\n"
        "\n"
        "Refer to the format of a trivial design above. Be very creative and "
        "give `{func_name}_v2`. Output code only and enclose your code with "
        "Python code block: ```python ... ```.\n"
        "\n"
        "{initial_long-term_reflection}\n"
    ),
    "user_crossover": (
        "{task_description}\n"
        "\n"
        "[Worse code]\n"
        "{function_signature0}\n"
        "{worse_code}\n"
        "\n"
        "[Better code]\n"
        "{function_signature1}\n"
        "{better_code}\n"
        "\n"
        "[Reflection]\n"
        "{short_term_reflection}\n"
        "\n"
        "[Improved code]\n"
        "Please write an improved function `{function_name}_v2`, according to "
        "the reflection. Output code only and enclose your code with Python "
        "code block: ```python ... ```.\n"
    ),
    "user_short_reflection": (
        "Below are two {func_name} functions for {problem_desc}\n"
        "{func_desc}\n"
        "\n"
        "You are provided with two code versions below, where the second "
        "version performs better than the first one.\n"
        "\n"
        "[Worse code]\n"
        "{worse_code}\n"
        "\n"
        "[Worse code results analysis]\n"
        "{stats_info_worse}\n"
        "\n"
        "[Better code]\n"
        "{better_code}\n"
        "\n"
        "[Better code results analysis]\n"
        "\n"
        "{stats_info_better}\n"
        "\n"
        "Respond with some hints for designing better heuristics, based on "
        "the two code versions and the trajectory statistics. Be concise. "
        "Use a maximum of 200 words.\n"
    ),
    "user_long_reflection": (
        "Below are two {function_name} functions for {problem_description}\n"
        "{function_description}\n"
        "\n"
        "You are provided with two code versions below, where the second "
        "version performs better than the first one.\n"
        "\n"
        "[Worse code]\n"
        "{worse_code}\n"
        "\n"
        "[Better code]\n"
        "{better_code}\n"
        "\n"
        "You respond with some hints for designing better heuristics, based "
        "on the two code versions and using less than 20 words.\n"
    ),
    "user_mutation": (
        "{user_generator}\n"
        "\n"
        "[Prior reflection]\n"
        "{reflection}\n"
        "\n"
        "[Code]\n"
        "{func_signature1}\n"
        "{elitist_code}\n"
        "\n"
        "[Code Results Analysis]\n"
        "{stats_info_elitist}\n"
        "\n"
        "[Improved code]\n"
        "Please write a mutated function `{func_name}_v2`, according to the "
        "reflection. Output code only and enclose your code with Python code "
        "block: ```python ... ```.\n"
        "\n"
        "Please generate mutation versions that are significantly different "
        "from the base code to increase exploration diversity.\n"
    ),
    "function_signature": (
        "def predict_trajectory{version}(trajectory: np.ndarray) -> np.ndarray:\n"
    ),
    "function_description": (
        "The predict_trajectory function takes as input the current trajectory "
        "(8 frames) and generates 20 possible future trajectories for the next "
        "12 frames. It has only one parameter: the past trajectory array.\n"
        "The output is a numpy array of shape [20, num_agents, 12, 2] "
        "containing all 20 trajectories.\n"
        "Note that we are interesting in obtaining at least one good "
        "trajectory, not necessarily 20.\n"
        "Thus, diversifying a little bit is good.\n"
        "Note that the heuristic should be generalizable to new distributions.\n"
    ),
    "external_knowledge": (
        "# External Knowledge for Pedestrian Trajectory Prediction\n"
        "\n"
        "## Task Definition\n"
        "- We are using the ETH/UCY dataset for this task (human trajectory "
        "prediction)\n"
        "- Input: Past 8 frames of pedestrian positions\n"
        "- Output: Future 12 frames of pedestrian positions\n"
        "- Variable number of pedestrians per scene\n"
    ),
}

SEED_LINES = [
    "def predict_trajectory(trajectory):",
    '    """Generate 20 possible future trajectories',
    "    Args:",
    "        - trajectory [num_agents, traj_length, 2]: here the traj_length is 8;",
    "    Returns:",
    "        - 20 diverse trajectories [20, num_agents, 12, 2]",
    '    """',
    "    all_trajectories = []",
    "    for _ in range(20):",
    "        current_pos = trajectory[:, -1, :]",
    "        velocity = trajectory[:, -1, :] - trajectory[:, -2, :] # only use the last two frames",
    "        predictions = []",
    "        for t in range(1, 12+1): # 12 future frames",
    "            current_pos = current_pos + velocity * 1 # dt",
    "            predictions.append(current_pos.copy())",
    "        pred_trajectory = np.stack(predictions, axis=1)",
    "        all_trajectories.append(pred_trajectory)",
    "    all_trajectories = np.stack(all_trajectories, axis=0)",
    "    return all_trajectories",
]


class TestGoldenTemplates:
    @pytest.mark.parametrize("name", sorted(GOLDEN))
    def test_template_text(self, name):
        assert load_template(name) == GOLDEN[name]

    def test_seed_function_text(self):
        assert load_template("seed_function") == "\n".join(SEED_LINES) + "\n"

    def test_unknown_template(self):
        with pytest.raises(RenderError):
            load_template("user_bribe")


class TestRender:
    def test_crossover_headers_survive(self):
        bindings = {name: "X" for name in placeholders(load_template("user_crossover"))}
        out = render("user_crossover", bindings)
        for header in ("[Worse code]", "[Better code]", "[Reflection]", "[Improved code]"):
            assert header in out

    def test_empty_binding_leaves_header(self):
        bindings = {name: "" for name in placeholders(load_template("user_crossover"))}
        out = render("user_crossover", bindings)
        assert "[Reflection]\n\n" in out

    def test_sentinel_round_trip(self):
        template = load_template("user_init")
        tokens = placeholders(template)
        bindings = {tok: f"<<{i}-{tok}>>" for i, tok in enumerate(tokens)}
        out = render("user_init", bindings)
        for tok, sentinel in bindings.items():
            assert out.count(sentinel) == template.count("{%s}" % tok)

    def test_missing_binding_names_placeholder(self):
        with pytest.raises(RenderError) as exc:
            render("user_init", {"task_description": "t"})
        assert "{" in str(exc.value) and "}" in str(exc.value)

    def test_values_not_rescanned(self):
        out = render_text("{a} and {b}", {"a": "{b}", "b": "ignored"})
        assert out == "{b} and ignored"

    def test_hyphenated_token_recognized(self):
        tokens = placeholders(load_template("user_init"))
        assert "initial_long-term_reflection" in tokens

    def test_code_braces_in_values_pass_through(self):
        code = "def f():\n    return {0: 1, 'k': {2, 3}}"
        out = render_text("before\n{worse_code}\nafter", {"worse_code": code})
        assert code in out


class TestStatsBlock:
    def test_paper_shaped_prefix(self):
        histogram = {i: 0 for i in range(20)}
        histogram.update({0: 67, 1: 10, 2: 3, 3: 2, 4: 7, 19: 2})
        out = format_stats_block(histogram)
        assert "Traj Index: Count: {0: 67, 1: 10, 2: 3," in out
        assert out.startswith("<stats>\n")
        assert out.endswith("</stats>")
        assert "19: 2}" in out

    def test_all_zero_entries_rendered(self):
        out = format_stats_block({i: 0 for i in range(5)})
        for i in range(5):
            assert f"{i}: 0" in out

    def test_parse_inverts_format(self):
        histogram = {i: (i * 7) % 13 for i in range(20)}
        assert parse_stats_block(format_stats_block(histogram)) == histogram

    def test_sparse_keys_rejected(self):
        with pytest.raises(DataValidationError):
            format_stats_block({0: 1, 2: 1})

    def test_parse_rejects_junk(self):
        with pytest.raises(DataValidationError):
            parse_stats_block("no counts here")


class TestExtractCodeBlock:
    def test_single_block_verbatim(self):
        inner = "import numpy as np\n\nx = 1\n"
        assert extract_code_block(f"```python\n{inner}```") == inner

    def test_prose_around_block(self):
        reply = f"Sure, here you go:\n```python\ncode_line\n```\nHope it helps!"
        assert extract_code_block(reply) == "code_line\n"

    def test_first_of_two_blocks(self):
        reply = "```python\nfirst\n```\ntext\n```python\nsecond\n```"
        assert extract_code_block(reply) == "first\n"

    def test_no_block_raises(self):
        with pytest.raises(CodeExtractionError):
            extract_code_block("just words, no code")

    def test_bare_fence_language_optional(self):
        assert extract_code_block("```\nx = 2\n```") == "x = 2\n"


class TestReflectionMemory:
    def test_short_term_cap(self):
        memory = ReflectionMemory()
        memory.set_short_term(" ".join(f"w{i}" for i in range(250)))
        assert len(memory.short_term.split()) == 200
        assert memory.short_term.endswith("w199")

    def test_long_term_cap_per_item(self):
        memory = ReflectionMemory()
        memory.append_long_term(" ".join(f"w{i}" for i in range(30)))
        memory.append_long_term("short hint")
        assert len(memory.long_term[0].split()) == 20
        assert memory.long_term[1] == "short hint"
        assert memory.long_term_text() == memory.long_term[0] + "\nshort hint"

    def test_within_cap_text_untouched(self):
        text = "keep  double  spaces\nand newlines"
        assert truncate_words(text, 20) == text


class TestPromptBundle:
    def test_default_bundle_loads(self):
        bundle = default_bundle()
        assert "expert in the domain of prediction heuristics" in bundle.system_generator

    def test_rendered_task(self):
        bundle = default_bundle()
        task = bundle.rendered_task()
        assert task.startswith(f"Write a {FUNC_NAME} function for")
        assert "shape [20, num_agents, 12, 2]" in task
        assert "{" not in task.split("\n")[0]

    def test_signature_versions(self):
        bundle = default_bundle()
        assert bundle.signature("_v2").startswith(
            "def predict_trajectory_v2(trajectory: np.ndarray)"
        )
        assert bundle.signature("").startswith(
            "def predict_trajectory(trajectory: np.ndarray)"
        )

    def test_empty_field_rejected(self):
        with pytest.raises(DataValidationError):
            PromptBundle(
                system_generator="x",
                system_reflector="",
                task_description="t",
                function_signature="s",
                function_description="d",
                seed_function="f",
                external_knowledge="e",
            )
