import pytest

from helpers import make_tweet, make_user


@pytest.fixture
def user_factory():
    return make_user


@pytest.fixture
def tweet_factory():
    return make_tweet
