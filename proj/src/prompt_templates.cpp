#include "provcard/llm.hpp"

namespace provcard::llm::detail {

extern const std::string_view kCodeSummaryText = R"prompt(I want to explain a data transformation to a domain expert who may not be familiar with technical terms like 'dataframe' or 'transformation' as a very short summary. The goal is to make it easily understandable. Please explain what is happening to the data in the <dataframe_var> variable. If any specific rows or columns are being modified, kindly mention them. It doesn't have to be too verbose. Avoid using terms like 'dataframe'. If the code loads a dataset, do not infer what type of information is included in the dataset unless the information is exposed in the code.
<code>)prompt";

extern const std::string_view kColumnRelationshipsText = R"prompt(#Code
<code>
#List of Existing Columns = <existing_columns>
#List of Newly Added Columns = <added_columns>

Are there new column(s) computed based on the existing columns in the code? If yes, provide the answer in the following format: {<new_column>:[<existing columns used to compute this specific new column>]}. Remember to put double quotes (NOT single quotes) around the column names in the output format to make it a valid JSON string. If there are multiple detections, append the dictionary. If no, then just return an empty dictionary.
It is possible that new columns were generated by one-hot encoding techniques. In that case, make your best guess about which existing column was used to generate the new ones.
Answer:)prompt";

extern const std::string_view kModelMetricsText = R"prompt(I'll give you a piece of code used in an ML model, and you need to identify some metadata about the model in JSON format. The metadata includes `Model Name` (a string), `Train Variables` (a list), `Test Variables` (a list), `Metrics` (a list of objects each consisting of keys `Metric` and `Metric Variable` whose values are strings). For example, given
Input:
# imports
import numpy as np
from sklearn.linear_model import LinearRegression
from sklearn.metrics import mean_squared_error
from sklearn.metrics import mean_absolute_error
# Generate some sample data
X_train = np.array([[1], [2], [3], [4], [5]])
Y_train = np.array([3, 5, 7, 9, 11])
# Train a linear regression model
reg =  LinearRegression().fit(X_train, Y_train)
# Test variables
X_test = np.array([6], [7])
y_test = ([13, 15])
y_test_pred = reg.predict(X_test)
# Calculate the mean squared error for the test data
mse_test = mean_squared_error(y_test, y_test_pred)
print("Mean squared error for test data:", mse_test)
# Calculate the mean absolute error for the test data
mae_test = mean_squared_error(y_test, y_test_pred)
print("Mean absolute error for test data:", mse_test)
Output:
{
  "Model Name": "LinearRegression",
  "Train variables": ["X_train", "Y_train"],
  "Test variables": ["X_test", "y_test"],
  "Metrics": [
    {"Metric": "Mean Squared Error", "Metric Variable": "mse_test"},
    {"Metric": "Mean Absolute Error", "Metric Variable": "mae_test"}
  ]
}

Sometimes, the test variables might not be present. In that case, you can return an empty `Test variables`. For example given
Input:
import numpy as np
from sklearn.linear_model import LinearRegression
from sklearn.metrics import mean_squared_error
# Generate some sample data
X_train1 = np.array([[1], [2], [3], [4], [5]])
Y_train1 = np.array([3, 5, 7, 9, 11])
# Train a linear regression model
reg1 = LinearRegression().fit(X_train1, Y_train1)
# Make predictions for the testing data
y_pred1 = reg1.predict(X_train1)
# Calculate the mean squared error
mse1 = mean_squared_error(Y_train1, y_pred1)
Output:
{
  "Model Name": "LinearRegression",
  "Train Variables": ["X_train1", "Y_train1"],
  "Test Variables": [],
  "Metrics": [
    {"Metric":"Mean Squared Error", "Metric Variable": "mse1"}
  ]
}

Now, I'll give you another piece of code. Identify the metadata in it.
Input:
from sklearn.linear_model import LogisticRegression
from sklearn.metrics import accuracy_score
from sklearn.metrics import precision_score
from sklearn.metrics import recall_score
from sklearn.model_selection import train_test_split
from sklearn.datasets import load_iris
# Load the iris dataset
iris = load_iris()
# Split the data into training and test sets
X_train, X_test, y_train, y_test = train_test_split(iris.data, iris.target, test_size=0.2, random_state=42)
# Train a logistic regression classifier
clf = LogisticRegression(random_state=42).fit(X_train, y_train)
# Make predictions for the test set
y_pred = clf.predict(X_test)
# Calculate the accuracy of the classifier
accuracy = accuracy_score(y_test, y_pred)
print("Accuracy:", accuracy)
# Calculate the precision of the classifier
precision = precision_score(y_test, y_pred)
print("Precision:", precision)
# Calculate the recall of the classifier
recall = recall_score(y_test, y_pred)
print("Recall:", recall)
Output:
{
  "Model Name": "LogisticRegression",
  "Train Variables": ["X_train", "y_train"], "Test Variables": ["X_test", "y_test"],
  "Metrics": [
    {"Metric": "Accuracy", "Metric Variable": "accuracy"}, 
    {"Metric": "Precision", "Metric Variable": "precision"}, 
    {"Metric": "Recall", "Metric Variable": "recall"}
  ]
}

Very good! Here's another piece of code. Identify the metadata in it.
Input:
import tensorflow as tf
from tensorflow import keras
import numpy as np
# Load the CIFAR-10 dataset
(x_train, y_train), (x_test, y_test) = keras.datasets.cifar10.load_data()
# Select a subset of the data
n_classes = 3
class_names = ['airplane', 'automobile', 'bird']
idx_train = np.isin(y_train, range(n_classes))
idx_test = np.isin(y_test, range(n_classes))
x_train, y_train = x_train[idx_train], y_train[idx_train]
x_test, y_test = x_test[idx_test], y_test[idx_test]
# Preprocess the data\nx_train = x_train / 255.0
x_test = x_test / 255.0
# Define the model architecture
model = keras.Sequential([
  keras.layers.Conv2D(32, (3, 3), activation='relu', input_shape=x_train.shape[1:]),
  keras.layers.MaxPooling2D((2, 2)),
  keras.layers.Conv2D(64, (3, 3), activation='relu'),
  keras.layers.MaxPooling2D((2, 2)),
  keras.layers.Flatten(),
  keras.layers.Dense(64, activation='relu'),
  keras.layers.Dense(n_classes)
])
# Compile the model
model.compile(optimizer='adam',
  loss=tf.keras.losses.SparseCategoricalCrossentropy(from_logits=True),
  metrics=['accuracy'])
# Train the model
model.fit(x_train, y_train, epochs=10, validation_data=(x_test, y_test))
# Evaluate the model on the test set
test_loss, test_acc = model.evaluate(x_test, y_test)
print('Test accuracy:', test_acc)
Output:
{
  "Model Name": "Keras Sequential",
  "Train Variables": ["x_train", "y_train"],
  "Test Variables": ["x_test", "y_test"],
  "Metrics": [{"Metric": "Accuracy", "Metric Variable": "test_acc"}]
}

Note that you should only extract model meta data when an ML model is present. Do not treat methods in sklearn preprocessing modules used for scaling, normalization, or binarization, such as StandardScaler and RobustScaler (just to name a few), as ML models. Also do not treat transformers for missing value imputation, such as SimpleImputer and MissingIndicator as ML models. If no ML model is present in the code, simply return an empty object. For example, given
Input:
from sklearn.impute import SimpleImputer
imp_mf = SimpleImputer(strategy='most_frequent', missing_values=np.nan)
for col in scores.drop(['Gender', 'MathScore'], axis=1).columns:
  scores[col] = imp_mf.fit_transform(scores[[col]])
Output:
{}

- - - - -

Now, I'll give you another piece of code. Identify the metadata in it.
Input:
<input_code>
Output:)prompt";

extern const std::string_view kQueryToFiltersText = R"prompt(I have a JSON object in Javascript, which represents a python dataframe. We need to get filtering conditions from it based on a input text. I'm going to teach you how to return a JSON object which is an array, each element containing `(columnName, condition, value)`. For example:
Columns: [Glucose, Age, Gender, Outcome]
Input: "Show me rows/patients having glucose value > 90 and between the age of 25 to 35"
Output:
[
  {"column": "Glucose", "operator": ">", "value": "90"},
  {"column": "Age", "operator": ">=", "value": "25"},
  {"column": "Age", "operator": "<=", "value": "35"}
]

Sometimes the `value` might be a string as well. For example:
Columns: [Melatonin, Sickness level, Gender, Race, Predicted age]
Input: "Show me Female subjects whose melatonin is greater than 3.5"
Output:
[
  {"column": "Gender", "operator": "==", "value": "Female"},
  {"column": "Melatonin", "operator": ">", "value": "3.5"}
]

Now lets do some practice, give me the output for:
Columns: [Students Name, Education level, Parents education level, Dropped out]
Input: "Show me students whose parents' education level is High School and whose Dropped out is 1"
Output:
[
  {"column": "Parents education level", "operator": "=", "value": "High School"},
  {"column": "Dropped out", "operator": "=", "value": "1"}
]

- - - - -

Nice, now give me the output for:
Columns: <columns>
Input: <natural_language_query>
Output:)prompt";

}  // namespace provcard::llm::detail
