"""quizforge: MCQ generation from course learning objectives, plus the
annotation, adjudication and agreement-statistics toolkit used to judge the
output against human-written question pools."""

from .model import (
    BloomLevel,
    Choice,
    Course,
    CourseModule,
    GenerationParams,
    LearningObjective,
    Mcq,
    McqSource,
    QuestionType,
    QuizforgeError,
    validate_mcq,
)

__all__ = [
    "BloomLevel",
    "Choice",
    "Course",
    "CourseModule",
    "GenerationParams",
    "LearningObjective",
    "Mcq",
    "McqSource",
    "QuestionType",
    "QuizforgeError",
    "validate_mcq",
]

__version__ = "0.1.0"
